# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_fallback.py`` (same signatures)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, fabs, cbrt, M_PI

cnp.import_array()

cdef double SERIES_MAX = 4.0
cdef double MILLER_MAX = 25.0
cdef double J1_OVER_Z_SEAM = 1e-2
cdef int N_SERIES = 28
cdef int N_ASYMPTOTIC = 22


cdef inline double _series(double z, int order) nogil:
    cdef double q = -0.25 * z * z
    cdef double term = 1.0 if order == 0 else 0.5 * z
    cdef double total = term
    cdef int k
    for k in range(1, N_SERIES):
        term = term * q / (k * (k + order))
        total += term
    return total


cdef inline double _miller(double z, int order) nogil:
    cdef int m = 2 * <int>(0.5 * (z + 30.0 + 4.0 * cbrt(z))) + 2
    cdef double b_next = 0.0, b = 1e-30, b_prev, norm = 0.0, j1 = 0.0
    cdef int k
    for k in range(m, 0, -1):
        b_prev = (2.0 * k / z) * b - b_next
        b_next = b
        b = b_prev
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * b
        if k - 1 == 1:
            j1 = b
    norm += b
    if order == 0:
        return b / norm
    return j1 / norm


cdef inline double _asymptotic(double z, int order) nogil:
    cdef double mu = 4.0 * order * order
    cdef double a = 1.0, p = 1.0, q = 0.0, chi
    cdef int k
    for k in range(1, N_ASYMPTOTIC):
        a = a * (mu - (2 * k - 1) * (2 * k - 1)) / (8.0 * k * z)
        if k % 2 == 0:
            if (k // 2) % 2 == 0:
                p += a
            else:
                p -= a
        else:
            if ((k - 1) // 2) % 2 == 0:
                q += a
            else:
                q -= a
    chi = z - (0.5 * order + 0.25) * M_PI
    return sqrt(2.0 / (M_PI * z)) * (p * cos(chi) - q * sin(chi))


cdef inline double _bessel(double z, int order) nogil:
    cdef double az = fabs(z), out
    if az <= SERIES_MAX:
        out = _series(az, order)
    elif az <= MILLER_MAX:
        out = _miller(az, order)
    else:
        out = _asymptotic(az, order)
    if order == 1 and z < 0:
        return -out
    return out


cdef inline double _j1_over_z(double z) nogil:
    cdef double z2
    if fabs(z) < J1_OVER_Z_SEAM:
        z2 = z * z
        return 0.5 - z2 / 16.0 + z2 * z2 / 384.0
    return _bessel(z, 1) / z


def _map(z, int which):
    arr = np.asarray(z, dtype=np.float64)
    flat = np.ascontiguousarray(arr).reshape(-1)
    out = np.empty_like(flat)
    cdef const double[::1] zv = flat
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        if which == 0:
            for i in range(n):
                ov[i] = _bessel(zv[i], 0)
        elif which == 1:
            for i in range(n):
                ov[i] = _bessel(zv[i], 1)
        else:
            for i in range(n):
                ov[i] = _j1_over_z(zv[i])
    return out.reshape(arr.shape)


def j0(z):
    return _map(z, 0)


def j1(z):
    return _map(z, 1)


def j1_over_z(z):
    return _map(z, 2)


def midpoint_back_substitution(mat, rhs):
    """Solve ``mat @ x = rhs`` for upper-triangular ``mat`` from the last row up."""
    cdef const double[:, :] m = np.asarray(mat, dtype=np.float64)
    cdef const double[:] r = np.asarray(rhs, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0], i, j
    out = np.empty(n)
    cdef double[::1] x = out
    cdef double acc
    with nogil:
        for i in range(n - 1, -1, -1):
            acc = r[i]
            for j in range(i + 1, n):
                acc -= m[i, j] * x[j]
            x[i] = acc / m[i, i]
    return out


def heun_memory(kmat, g0, double dt):
    """Heun steps for g' = int_0^t K(s, t) g(s) ds with trapezoidal memory."""
    cdef const double[:, :] k = np.asarray(kmat, dtype=np.float64)
    cdef Py_ssize_t nt = k.shape[0], n, j
    out = np.zeros(nt, dtype=np.complex128)
    cdef double[::1] gr = np.zeros(nt)
    cdef double[::1] gi = np.zeros(nt)
    cdef complex g0c = g0
    gr[0] = g0c.real
    gi[0] = g0c.imag
    cdef double mem_r = 0.0, mem_i = 0.0, pr, pi_, diag, pred_r, pred_i, mp_r, mp_i
    with nogil:
        for n in range(nt - 1):
            pr = 0.5 * k[n + 1, 0] * gr[0]
            pi_ = 0.5 * k[n + 1, 0] * gi[0]
            for j in range(1, n + 1):
                pr += k[n + 1, j] * gr[j]
                pi_ += k[n + 1, j] * gi[j]
            diag = 0.5 * k[n + 1, n + 1]
            pred_r = gr[n] + dt * mem_r
            pred_i = gi[n] + dt * mem_i
            mp_r = dt * (pr + diag * pred_r)
            mp_i = dt * (pi_ + diag * pred_i)
            gr[n + 1] = gr[n] + 0.5 * dt * (mem_r + mp_r)
            gi[n + 1] = gi[n] + 0.5 * dt * (mem_i + mp_i)
            mem_r = dt * (pr + diag * gr[n + 1])
            mem_i = dt * (pi_ + diag * gi[n + 1])
    out.real = np.asarray(gr)
    out.imag = np.asarray(gi)
    return out


def boris_kick(v, e, b, double h):
    """Implicit-midpoint update of v' = E + v x B over a duration ``h``, in place."""
    cdef double[:, :] vv = v
    cdef const double[:, :] ev = np.asarray(e, dtype=np.float64)
    cdef const double[:, :] bv = np.asarray(b, dtype=np.float64)
    cdef Py_ssize_t n = vv.shape[0], i, ie, ib
    cdef bint e_each = ev.shape[0] > 1, b_each = bv.shape[0] > 1
    cdef double m0, m1, m2, t0, t1, t2, p0, p1, p2, f
    with nogil:
        for i in range(n):
            ie = i if e_each else 0
            ib = i if b_each else 0
            m0 = vv[i, 0] + 0.5 * h * ev[ie, 0]
            m1 = vv[i, 1] + 0.5 * h * ev[ie, 1]
            m2 = vv[i, 2] + 0.5 * h * ev[ie, 2]
            t0 = 0.5 * h * bv[ib, 0]
            t1 = 0.5 * h * bv[ib, 1]
            t2 = 0.5 * h * bv[ib, 2]
            p0 = m0 + m1 * t2 - m2 * t1
            p1 = m1 + m2 * t0 - m0 * t2
            p2 = m2 + m0 * t1 - m1 * t0
            f = 2.0 / (1.0 + t0 * t0 + t1 * t1 + t2 * t2)
            vv[i, 0] = m0 + f * (p1 * t2 - p2 * t1) + 0.5 * h * ev[ie, 0]
            vv[i, 1] = m1 + f * (p2 * t0 - p0 * t2) + 0.5 * h * ev[ie, 1]
            vv[i, 2] = m2 + f * (p0 * t1 - p1 * t0) + 0.5 * h * ev[ie, 2]


def gyro_flight(x, v, double dt, double omega):
    """Exact flow of x' = v, v' = omega v x e1 over ``dt``, in place."""
    cdef double[:, :] xv = x
    cdef double[:, :] vv = v
    cdef double theta = omega * dt, a, bb, c, s, v2, v3
    cdef Py_ssize_t n = xv.shape[0], i
    if fabs(theta) < 1e-8:
        a = 1.0 - theta * theta / 6.0
        bb = 0.5 * theta
    else:
        a = sin(theta) / theta
        bb = (1.0 - cos(theta)) / theta
    c = cos(theta)
    s = sin(theta)
    with nogil:
        for i in range(n):
            v2 = vv[i, 1]
            v3 = vv[i, 2]
            xv[i, 0] += dt * vv[i, 0]
            xv[i, 1] += dt * (a * v2 + bb * v3)
            xv[i, 2] += dt * (a * v3 - bb * v2)
            vv[i, 1] = c * v2 + s * v3
            vv[i, 2] = c * v3 - s * v2
