"""Two-scale limit profile F and weak-* limit f.

G solves d_t G + u1 d_x1 G + (Ẽ + u x B̃) . grad_u G = 0 with
G(0) = f0/(2 pi). When B̃ = 0, Ẽ_par = 0 and Ẽ does not depend on x1 the
characteristics are explicit:
    G(t, x, u) = f0(x1 - u1 t, x_perp, u1, u_perp - L(0, t, x_perp)) / (2 pi).
Then F(t, tau, x, v) = G(t, x, rotate(v, tau)) and f = int_0^{2 pi} F dtau.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .fields import YPoint, drift_primitive, gyroaverage_B, gyroaverage_E, validate_assumptions
from .mathcore import periodic_nodes, rotate
from .vlasov_sim import sample_initial


class AssumptionError(ValueError):
    """The closed-form limit needs the gyroaverage assumptions on the fields."""


@dataclass
class GSolution:
    spec: object
    data: object
    _report: object = field(default=None, repr=False)

    @property
    def report(self):
        if self._report is None:
            self._report = validate_assumptions(self.spec)
        return self._report

    def require_closed_form(self):
        if not self.report.passed:
            raise AssumptionError(f"closed-form limit unavailable, failed checks: {self.report.failures}")


def _drift(gs, t, xperp):
    """L(0, t, x_perp) for an array of perpendicular positions (..., 2)."""
    xperp = np.asarray(xperp, dtype=float)
    flat = xperp.reshape(-1, 2)
    uniq, inv = np.unique(flat, axis=0, return_inverse=True)
    vals = np.array([drift_primitive(gs.spec, np.array([float(t)]), YPoint(0.0, p[0], p[1]))[0] for p in uniq])
    return vals[inv.ravel()].reshape(xperp.shape[:-1] + (3,))


def _g_with_drift(gs, t, x, u, L):
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    x0 = np.array(np.broadcast_to(x, np.broadcast_shapes(x.shape, u.shape)))
    x0[..., 0] = x0[..., 0] - u[..., 0] * t
    u0 = u - L
    u0[..., 0] = u[..., 0]
    return gs.data.f0(x0, u0) / (2 * np.pi)


def limit_G(gs, t, x, u):
    """Closed-form G(t, x, u); raises AssumptionError when the field assumptions fail."""
    gs.require_closed_form()
    x = np.asarray(x, dtype=float)
    return _g_with_drift(gs, t, x, u, _drift(gs, t, x[..., 1:]))


def limit_G_characteristics(gs, t, x, u, nsteps=200):
    """G(t, x, u) by RK4 along backward characteristics (any field).

    Integrates x1' = u1, u' = Ẽ(s, x) + u x B̃(s, x) from s = t down to 0
    with x_perp frozen, then evaluates f0/(2 pi) at the foot point.
    """
    x = np.array(np.broadcast_to(np.asarray(x, dtype=float), np.broadcast_shapes(np.shape(x), np.shape(u))))
    u = np.array(np.broadcast_to(np.asarray(u, dtype=float), x.shape))
    if t == 0:
        return gs.data.f0(x, u) / (2 * np.pi)
    h = -t / nsteps

    def rhs(s, x, u):
        dx = np.zeros_like(x)
        dx[..., 0] = u[..., 0]
        du = gyroaverage_E(gs.spec, np.full(x.shape[:-1], s), x) + np.cross(u, gyroaverage_B(gs.spec, np.full(x.shape[:-1], s), x))
        return dx, du

    s = float(t)
    for _ in range(nsteps):
        k1x, k1u = rhs(s, x, u)
        k2x, k2u = rhs(s + h / 2, x + h / 2 * k1x, u + h / 2 * k1u)
        k3x, k3u = rhs(s + h / 2, x + h / 2 * k2x, u + h / 2 * k2u)
        k4x, k4u = rhs(s + h, x + h * k3x, u + h * k3u)
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        u = u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        s += h
    return gs.data.f0(x, u) / (2 * np.pi)


def profile_F(gs, t, tau, x, v):
    """F(t, tau, x, v) = G(t, x, rotate(v, tau))."""
    return limit_G(gs, t, x, rotate(v, tau))


def weak_star_f(gs, t, x, v, n_tau=64):
    """f(t, x, v) = int_0^{2 pi} F(t, tau, x, v) dtau (periodic trapezoid)."""
    if n_tau < 16:
        raise ValueError(f"n_tau must be >= 16, got {n_tau}")
    gs.require_closed_form()
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    L = _drift(gs, t, x[..., 1:])
    taus = periodic_nodes(n_tau)
    vals = _g_with_drift(gs, t, x[..., None, :], rotate(v[..., None, :], taus), L[..., None, :])
    return 2 * np.pi * vals.mean(axis=-1)


def _pushforward(gs, t, sampling):
    pts, w, f0v = sample_initial(gs.data, sampling)
    x0, u0 = pts[:, :3], pts[:, 3:]
    x = x0.copy()
    x[:, 0] += u0[:, 0] * t
    u = u0 + _drift(gs, t, x0[:, 1:])
    u[:, 0] = u0[:, 0]
    return x, u, w * f0v


def limit_observable(gs, t, psi, sampling, n_tau=64):
    """int f(t) psi dx dv, by pushing the quadrature of f0 along the limit flow.

    With u = rotate(v, tau) and the measure-preserving map
    (x0, u0) -> (x0 + u0_1 t e1, u0 + L(0, t, x0_perp)), the integral becomes
    (1/2 pi) int dtau int f0(x0, u0) psi(x, rotate(u, -tau)) dx0 du0.
    """
    gs.require_closed_form()
    x, u, wf = _pushforward(gs, t, sampling)
    total = 0.0
    for tau in periodic_nodes(n_tau):
        total += np.sum(wf * psi(x, rotate(u, -tau)))
    return float(total / n_tau)


def two_scale_limit_observable(gs, times, psi, sampling, n_tau=64):
    """int_0^T int_0^{2 pi} int F psi(t, tau, x, v) dtau dx dv dt, trapezoid in t."""
    gs.require_closed_form()
    times = np.asarray(times, dtype=float)
    taus = periodic_nodes(n_tau)
    vals = []
    for t in times:
        x, u, wf = _pushforward(gs, t, sampling)
        vals.append(np.mean([np.sum(wf * psi(t, tau, x, rotate(u, -tau))) for tau in taus]))
    vals = np.array(vals)
    return float(np.sum(0.5 * np.diff(times) * (vals[1:] + vals[:-1])))


def write_point_cloud_csv(path, t, x, v, f):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x1", "x2", "x3", "v1", "v2", "v3", "f"])
        for xi, vi, fi in zip(np.atleast_2d(x), np.atleast_2d(v), np.atleast_1d(f)):
            w.writerow([repr(float(t))] + [repr(float(c)) for c in xi] + [repr(float(c)) for c in vi] + [repr(float(fi))])
