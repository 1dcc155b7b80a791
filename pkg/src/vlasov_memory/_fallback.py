"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_core.pyx``;
``vlasov_memory._backend`` picks the compiled one when it is importable.
"""

import numpy as np

SERIES_MAX = 4.0
MILLER_MAX = 25.0
J1_OVER_Z_SEAM = 1e-2
_N_SERIES = 28
_N_ASYMPTOTIC = 22


def _series(z, order):
    # sum_k (-1)^k (z/2)^(2k+order) / (k! (k+order)!)
    q = -0.25 * z * z
    term = np.ones_like(z) if order == 0 else 0.5 * z
    total = term.copy()
    for k in range(1, _N_SERIES):
        term = term * q / (k * (k + order))
        total += term
    return total


def _miller(z):
    # backward recurrence J_{k-1} = (2k/z) J_k - J_{k+1}, normalised by
    # 1 = J_0 + 2 (J_2 + J_4 + ...)
    m = 2 * int(0.5 * (float(z.max()) + 30.0 + 4.0 * float(z.max()) ** (1 / 3))) + 2
    b_next = np.zeros_like(z)
    b = np.full_like(z, 1e-30)
    norm = np.zeros_like(z)
    j0 = j1 = None
    for k in range(m, 0, -1):
        b_prev = (2.0 * k / z) * b - b_next
        b_next, b = b, b_prev
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * b
        if k - 1 == 1:
            j1 = b.copy()
    j0 = b
    norm += j0
    return j0 / norm, j1 / norm


def _asymptotic(z, order):
    mu = 4.0 * order * order
    a = np.ones_like(z)
    p = np.ones_like(z)
    q = np.zeros_like(z)
    for k in range(1, _N_ASYMPTOTIC):
        a = a * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        if k % 2 == 0:
            p += (-1) ** (k // 2) * a
        else:
            q += (-1) ** ((k - 1) // 2) * a
    chi = z - (0.5 * order + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * z)) * (p * np.cos(chi) - q * np.sin(chi))


def _bessel(z, order):
    z = np.asarray(z, dtype=float)
    az = np.abs(z)
    out = np.empty_like(az)
    small = az <= SERIES_MAX
    mid = (az > SERIES_MAX) & (az <= MILLER_MAX)
    big = az > MILLER_MAX
    if small.any():
        out[small] = _series(az[small], order)
    if mid.any():
        out[mid] = _miller(az[mid])[order]
    if big.any():
        out[big] = _asymptotic(az[big], order)
    if order == 1:
        out = np.where(z < 0, -out, out)
    return out


def j0(z):
    return _bessel(z, 0)


def j1(z):
    return _bessel(z, 1)


def j1_over_z(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    near = np.abs(z) < J1_OVER_Z_SEAM
    zn = z[near]
    z2 = zn * zn
    out[near] = 0.5 - z2 / 16.0 + z2 * z2 / 384.0
    far = ~near
    out[far] = j1(z[far]) / z[far]
    return out


def midpoint_back_substitution(mat, rhs):
    """Solve ``mat @ x = rhs`` for upper-triangular ``mat`` from the last row up."""
    n = rhs.shape[0]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        acc = rhs[i] - mat[i, i + 1:n] @ x[i + 1:n]
        x[i] = acc / mat[i, i]
    return x


def heun_memory(kmat, g0, dt):
    """Heun steps for g' = int_0^t K(s, t) g(s) ds with trapezoidal memory.

    ``kmat[n, j]`` holds K(t_j, t_n) for j <= n; the upper triangle is ignored.
    """
    nt = kmat.shape[0]
    g = np.zeros(nt, dtype=complex)
    g[0] = g0
    mem = 0.0 + 0.0j
    for n in range(nt - 1):
        row = kmat[n + 1]
        # trapezoid over nodes 0..n+1, without the unknown endpoint term
        partial = 0.5 * row[0] * g[0]
        if n >= 1:
            partial += row[1:n + 1] @ g[1:n + 1]
        diag = 0.5 * row[n + 1]
        pred = g[n] + dt * mem
        mem_pred = dt * (partial + diag * pred)
        g[n + 1] = g[n] + 0.5 * dt * (mem + mem_pred)
        mem = dt * (partial + diag * g[n + 1])
    return g


def boris_kick(v, e, b, h):
    """Implicit-midpoint update of v' = E + v x B over a duration ``h``, in place.

    ``e`` and ``b`` are (N, 3) or (1, 3) arrays.
    """
    v_minus = v + 0.5 * h * e
    t = 0.5 * h * b
    v_prime = v_minus + np.cross(v_minus, t)
    s = 2.0 * t / (1.0 + np.sum(t * t, axis=-1, keepdims=True))
    v[...] = v_minus + np.cross(v_prime, s) + 0.5 * h * e


def gyro_flight(x, v, dt, omega):
    """Exact flow of x' = v, v' = omega v x e1 over ``dt``, in place."""
    theta = omega * dt
    if abs(theta) < 1e-8:
        a, bb = 1.0 - theta * theta / 6.0, 0.5 * theta
    else:
        a = np.sin(theta) / theta
        bb = (1.0 - np.cos(theta)) / theta
    c, s = np.cos(theta), np.sin(theta)
    v2 = v[:, 1].copy()
    v3 = v[:, 2].copy()
    x[:, 0] += dt * v[:, 0]
    x[:, 1] += dt * (a * v2 + bb * v3)
    x[:, 2] += dt * (a * v3 - bb * v2)
    v[:, 1] = c * v2 + s * v3
    v[:, 2] = c * v3 - s * v2
