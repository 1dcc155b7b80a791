"""Memory kernel of the effective equation.

K(s, t, y; ik) = exp(-i k1 y1 (t - s)) K̃(s, t, y; ik), where K̃ is real and
solves the first-kind Volterra equation

    int_s^t A(s, sigma) K̃(sigma, t) dsigma = d_t A(s, t),
    A(s, t) = J0(|k_perp| |L(s, t, y)|).

Closed forms exist for time-independent and separable fields; otherwise the
equation is solved numerically by midpoint product integration.
"""

import csv
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .fields import Separable, YPoint, drift_L, drift_primitive, gyroaverage_E
from .mathcore import bessel_j0, j1_over_z, periodic_nodes, rotate

ROUTES = ("explicit_timeindep", "explicit_separable", "volterra_numeric")
MIN_DIAGONAL = 0.5


class KernelUsageError(TypeError):
    """A closed-form kernel was requested for a field of the wrong kind."""


class ResolutionError(ValueError):
    """The Volterra grid is too coarse for the oscillation of A."""


@dataclass(frozen=True)
class KMode:
    """Wave vector k = (k1, kperp cos(dir), kperp sin(dir))."""

    k1: float
    kperp: float
    kperp_dir: float = 0.0

    def __post_init__(self):
        if not self.kperp >= 0.0:
            raise ValueError(f"kperp must be >= 0, got {self.kperp}")

    @classmethod
    def from_vector(cls, k):
        k = np.asarray(k, dtype=float)
        return cls(float(k[0]), float(np.hypot(k[1], k[2])), float(np.arctan2(k[2], k[1])))

    @property
    def vector(self):
        return np.array([self.k1, self.kperp * np.cos(self.kperp_dir), self.kperp * np.sin(self.kperp_dir)])

    @property
    def norm_sq(self):
        return self.k1 ** 2 + self.kperp ** 2


@dataclass
class KernelGrid:
    """K̃(s, t) sampled at s_nodes for one (t, y, mode)."""

    t: float
    s_nodes: np.ndarray
    ktilde: np.ndarray
    y: YPoint
    mode: KMode
    provenance: str

    @property
    def values(self):
        """Complex K(s, t) including the streaming phase."""
        return np.exp(-1j * self.mode.k1 * self.y.v1 * (self.t - self.s_nodes)) * self.ktilde

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "t", "y1", "y2", "y3", "k1", "kperp", "re(K)", "im(K)", "provenance"])
            for s, k in zip(self.s_nodes, self.values):
                w.writerow([repr(float(s)), repr(float(self.t)), self.y.v1, self.y.x2, self.y.x3,
                            self.mode.k1, self.mode.kperp, repr(float(k.real)), repr(float(k.imag)), self.provenance])


def coincidence_value(spec, t, y, mode):
    """K̃(t, t) = -|k_perp|^2 |Ẽ(t, y)|^2 / 2."""
    et = gyroaverage_E(spec, t, y.position())
    return -0.5 * mode.kperp ** 2 * float(et @ et)


def amplitude_A(spec, s, t, y, mode):
    """A(s, t) = J0(|k_perp| |L(s, t, y)|)."""
    return bessel_j0(mode.kperp * np.linalg.norm(drift_L(spec, s, t, y)))


def amplitude_A_dt(spec, s, t, y, mode):
    """d_t A(s, t) = -(L . Ẽ(t)) |k_perp|^2 J1(|k_perp||L|)/(|k_perp||L|)."""
    L = drift_L(spec, s, t, y)
    et = gyroaverage_E(spec, t, y.position())
    return -float(L @ et) * mode.kperp ** 2 * j1_over_z(mode.kperp * np.linalg.norm(L))


def amplitude_A_quadrature(spec, s, t, y, mode, n_tau=128, n_sigma=64):
    """Oracle for A from its defining double average.

    A = (1/2 pi) int_0^{2 pi} exp(-i k . int_s^t rotate(Ẽ(sigma, y), -tau) dsigma) dtau,
    with Gauss-Legendre in sigma and the periodic trapezoid in tau. Does not
    use drift_L or the Bessel routines.
    """
    xg, wg = np.polynomial.legendre.leggauss(n_sigma)
    sig = 0.5 * (t - s) * xg + 0.5 * (t + s)
    et = gyroaverage_E(spec, sig, np.broadcast_to(y.position(), sig.shape + (3,)))
    taus = periodic_nodes(n_tau)
    inner = 0.5 * (t - s) * np.einsum("j,jtc->tc", wg, rotate(et[:, None, :], -taus[None, :]))
    phase = inner @ mode.vector
    return float(np.mean(np.exp(-1j * phase)).real)


def _require_time_independent(spec):
    if not getattr(spec, "time_independent", False):
        raise KernelUsageError(f"{type(spec).__name__} is not a time-independent field")


def _require_separable(spec):
    if not isinstance(spec, Separable) or spec.primitive is None:
        raise KernelUsageError("closed-form separable kernel needs a Separable field with a registered primitive")


def ktilde_time_independent(spec, s, t, y, mode):
    """K̃(s, t) = -C^2 J1(C(t - s))/(C(t - s)), C = |k_perp||Ẽ(y)|."""
    _require_time_independent(spec)
    et = gyroaverage_E(spec, 0.0, y.position())
    c = mode.kperp * np.linalg.norm(et)
    return -c * c * j1_over_z(c * (np.asarray(t, dtype=float) - np.asarray(s, dtype=float)))


def ktilde_separable(spec, s, t, y, mode):
    """K̃(s, t) = -E(t)E(s) c^2 J1(c(Phi(t) - Phi(s)))/(c(Phi(t) - Phi(s))), c = |k_perp||g̃(y)|."""
    _require_separable(spec)
    xp = np.array([y.x2, y.x3])
    c = mode.kperp * np.linalg.norm(spec.g_tilde(xp))
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    es = np.asarray(spec.scalar_profile(s, xp), dtype=float)
    et = np.asarray(spec.scalar_profile(t, xp), dtype=float)
    dphi = np.asarray(spec.primitive(t, xp), dtype=float) - np.asarray(spec.primitive(s, xp), dtype=float)
    return -et * es * c * c * j1_over_z(c * dphi)


def kernel_K(spec, s, t, y, mode, ktilde_value):
    """K = exp(-i k1 y1 (t - s)) K̃."""
    return np.exp(-1j * mode.k1 * y.v1 * (np.asarray(t) - np.asarray(s))) * ktilde_value


def default_route(spec):
    if isinstance(spec, Separable) and spec.primitive is not None:
        return "explicit_separable"
    if getattr(spec, "time_independent", False):
        return "explicit_timeindep"
    return "volterra_numeric"


class VolterraSystem:
    """Midpoint product-integration system on the uniform grid t_j = j dt.

    Unknowns sit at midpoints sigma_{j+1/2}; equations are collocated at the
    nodes s_i. The matrix dt A(s_i, sigma_{j+1/2}) does not depend on the
    target time, so one system serves every t_n through its leading n x n
    block.
    """

    def __init__(self, spec, y, kperp, dt, nsteps):
        if nsteps < 1 or not dt > 0:
            raise ValueError("need nsteps >= 1 and dt > 0")
        self.spec, self.y, self.kperp, self.dt, self.nsteps = spec, y, float(kperp), float(dt), int(nsteps)
        self.nodes = self.dt * np.arange(nsteps + 1)
        mids = self.nodes[:-1] + 0.5 * self.dt
        self.p_nodes = drift_primitive(spec, self.nodes, y)
        p_mids = drift_primitive(spec, mids, y)
        dist = np.linalg.norm(p_mids[None, :, :] - self.p_nodes[:-1, None, :], axis=-1)
        self.matrix = np.triu(self.dt * kernels.j0(self.kperp * dist))
        self.e_nodes = gyroaverage_E(spec, self.nodes, np.broadcast_to(y.position(), self.nodes.shape + (3,)))
        diag = np.diag(self.matrix) / self.dt
        if diag.size and diag.min() < MIN_DIAGONAL:
            raise ResolutionError(f"diagonal of A drops to {diag.min():.3f} < {MIN_DIAGONAL}; increase the grid size")

    def rhs(self, n):
        """d_t A(s_i, t_n) for i = 0..n-1."""
        L = self.p_nodes[n] - self.p_nodes[:n]
        dot = L @ self.e_nodes[n]
        return -dot * self.kperp ** 2 * kernels.j1_over_z(self.kperp * np.linalg.norm(L, axis=-1))

    def midpoint_values(self, n):
        return kernels.midpoint_back_substitution(np.ascontiguousarray(self.matrix[:n, :n]), self.rhs(n))

    def node_values(self, n):
        """K̃(t_j, t_n), j = 0..n, from midpoint values."""
        if n == 0:
            return np.array([coincidence_value(self.spec, 0.0, self.y, KMode(0.0, self.kperp))])
        mid = self.midpoint_values(n)
        out = np.empty(n + 1)
        if n == 1:
            out[:] = mid[0]
            return out
        out[1:n] = 0.5 * (mid[:-1] + mid[1:])
        out[0] = 1.5 * mid[0] - 0.5 * mid[1]
        out[n] = 1.5 * mid[-1] - 0.5 * mid[-2]
        return out


def ktilde_volterra_numeric(spec, t, y, mode, n=256):
    """Numerical K̃(·, t) on n + 1 uniform nodes of [0, t]."""
    if t <= 0:
        return KernelGrid(float(t), np.zeros(0), np.zeros(0), y, mode, "volterra_numeric")
    if n < 8:
        raise ValueError(f"grid size must be >= 8, got {n}")
    system = VolterraSystem(spec, y, mode.kperp, t / n, n)
    return KernelGrid(float(t), system.nodes, system.node_values(n), y, mode, "volterra_numeric")


def ktilde_grid(spec, t, y, mode, n=256, route=None):
    """K̃(·, t) on n + 1 uniform nodes of [0, t] by the chosen route."""
    route = route or default_route(spec)
    if route == "volterra_numeric":
        return ktilde_volterra_numeric(spec, t, y, mode, n)
    s = np.linspace(0.0, t, n + 1)
    if route == "explicit_timeindep":
        vals = ktilde_time_independent(spec, s, t, y, mode)
    elif route == "explicit_separable":
        vals = ktilde_separable(spec, s, t, y, mode)
    else:
        raise ValueError(f"unknown kernel route {route!r}")
    return KernelGrid(float(t), s, np.asarray(vals, dtype=float), y, mode, route)


def kernel_matrix(spec, y, mode, dt, nsteps, route=None):
    """Lower-triangular kmat[n, j] = K̃(t_j, t_n) on t_j = j dt."""
    route = route or default_route(spec)
    times = dt * np.arange(nsteps + 1)
    if route == "explicit_timeindep":
        kmat = ktilde_time_independent(spec, times[None, :], times[:, None], y, mode)
    elif route == "explicit_separable":
        kmat = ktilde_separable(spec, times[None, :], times[:, None], y, mode)
    elif route == "volterra_numeric":
        system = VolterraSystem(spec, y, mode.kperp, dt, nsteps)
        kmat = np.zeros((nsteps + 1, nsteps + 1))
        for n in range(nsteps + 1):
            kmat[n, :n + 1] = system.node_values(n)
    else:
        raise ValueError(f"unknown kernel route {route!r}")
    return np.tril(np.asarray(kmat, dtype=float))


class KernelCache:
    """Per-(t, y, kperp, n, route) store of KernelGrids.

    K̃ does not depend on k1, so keys drop it. Instances are not shared
    between workers; give each worker its own cache.
    """

    def __init__(self, spec):
        self.spec = spec
        self._grids = {}

    def get(self, t, y, mode, n=256, route=None):
        route = route or default_route(self.spec)
        key = (float(t), y, mode.kperp, int(n), route)
        if key not in self._grids:
            self._grids[key] = ktilde_grid(self.spec, t, y, KMode(0.0, mode.kperp), n, route)
        g = self._grids[key]
        return KernelGrid(g.t, g.s_nodes, g.ktilde, y, mode, g.provenance)

    def __len__(self):
        return len(self._grids)


_RES_X, _RES_W = np.polynomial.legendre.leggauss(8)


def volterra_residual(spec, grid, sub_panels=2):
    """max_i |int_{s_i}^t A(s_i, sigma) K̃(sigma, t) dsigma - d_t A(s_i, t)|.

    K̃ is interpolated by a cubic spline through the grid values and the
    integral uses 8-point Gauss-Legendre on ``sub_panels`` panels per grid
    interval, so it is finer than any solve on the same grid.
    """
    from scipy.interpolate import CubicSpline

    s = np.asarray(grid.s_nodes, dtype=float)
    if s.size < 2:
        return 0.0
    y, kp, t = grid.y, grid.mode.kperp, grid.t
    edges = np.linspace(s[0], s[-1], sub_panels * (s.size - 1) + 1)
    half = 0.5 * np.diff(edges)
    qx = (edges[:-1, None] + half[:, None] * (_RES_X[None, :] + 1.0)).ravel()
    qw = (half[:, None] * _RES_W[None, :]).ravel()
    ktq = CubicSpline(s, grid.ktilde)(qx)
    p_q = drift_primitive(spec, qx, y)
    p_s = drift_primitive(spec, s, y)
    p_t = drift_primitive(spec, np.array([t]), y)[0]
    et = gyroaverage_E(spec, t, y.position())
    worst = 0.0
    for i in range(s.size - 1):
        sel = qx > s[i]
        a = kernels.j0(kp * np.linalg.norm(p_q[sel] - p_s[i], axis=-1))
        lhs = np.sum(qw[sel] * a * ktq[sel])
        L = p_t - p_s[i]
        rhs = -float(L @ et) * kp * kp * j1_over_z(kp * np.linalg.norm(L))
        worst = max(worst, abs(lhs - rhs))
    return float(worst)
