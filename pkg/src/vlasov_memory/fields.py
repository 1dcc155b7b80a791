"""Oscillating field scenarios and their gyroaverages.

A field scenario supplies E(t, tau, x) and the oscillating magnetic part
B(t, tau, x), both 2 pi-periodic in the fast angle tau. The strong guide
field e1/eps is not part of a scenario; the particle pusher adds it.

Field callables broadcast: ``t`` and ``tau`` broadcast against ``x[..., 0]``
and the result carries a trailing axis of length 3.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .mathcore import E2, periodic_average, periodic_nodes, rotate

DEFAULT_TAU_NODES = 128
DRIFT_RTOL = 1e-10


class ConfigurationError(ValueError):
    """Unknown scenario or invalid scenario parameters."""


@dataclass(frozen=True)
class YPoint:
    """Parameter point y = (v1, x2, x3) of the effective equation."""

    v1: float
    x2: float
    x3: float

    def position(self, x1=0.0):
        return np.array([x1, self.x2, self.x3], dtype=float)

    def as_array(self):
        return np.array([self.v1, self.x2, self.x3], dtype=float)


def _shape(t, tau, x):
    x = np.asarray(x, dtype=float)
    return np.broadcast_shapes(np.shape(t), np.shape(tau), x.shape[:-1])


class FieldSpec:
    """Base class for field scenarios."""

    name = "field"
    #: Ẽ does not depend on t, so L(s, t, y) = (t - s) Ẽ(y)
    time_independent = False

    def E(self, t, tau, x):
        raise NotImplementedError

    def B(self, t, tau, x):
        return np.zeros(_shape(t, tau, x) + (3,))

    def drift_primitive_closed(self, t, y):
        """Closed form of L(0, t, y) when the scenario registers one, else None."""
        return None


@dataclass(frozen=True)
class CircularResonant(FieldSpec):
    """E = amplitude * rotate(e2, -tau): rotates with the cyclotron motion."""

    amplitude: float = 1.0
    name = "circular_resonant"
    time_independent = True

    def E(self, t, tau, x):
        shape = _shape(t, tau, x)
        tau = np.broadcast_to(tau, shape)
        return self.amplitude * rotate(E2, -tau)

    def drift_primitive_closed(self, t, y):
        t = np.asarray(t, dtype=float)
        return self.amplitude * t[..., None] * E2


@dataclass(frozen=True)
class Separable(FieldSpec):
    """E_perp(t, tau, x) = scalar_profile(t, x_perp) * angular_profile(tau, x_perp).

    ``scalar_profile(t, xperp)`` is real; ``angular_profile(tau, xperp)``
    returns vectors with zero first component. ``primitive(t, xperp)`` is a
    time primitive of ``scalar_profile``; when given it accelerates L and
    enables the closed-form kernel.
    """

    scalar_profile: Callable
    angular_profile: Callable
    primitive: Callable | None = None
    name: str = "separable"

    def E(self, t, tau, x):
        x = np.asarray(x, dtype=float)
        xp = x[..., 1:]
        amp = np.asarray(self.scalar_profile(t, xp), dtype=float)
        return amp[..., None] * np.asarray(self.angular_profile(tau, xp), dtype=float)

    def g_tilde(self, xperp, n=DEFAULT_TAU_NODES):
        """Gyroaverage of the angular profile at fixed x_perp."""
        xperp = np.asarray(xperp, dtype=float)

        def integrand(taus):
            xp = np.broadcast_to(xperp, taus.shape + (2,))
            return rotate(self.angular_profile(taus, xp), taus)

        return periodic_average(integrand, n)

    def drift_primitive_closed(self, t, y):
        if self.primitive is None:
            return None
        xp = np.array([y.x2, y.x3])
        t = np.asarray(t, dtype=float)
        dphi = np.asarray(self.primitive(t, xp) - self.primitive(0.0, xp), dtype=float)
        return dphi[..., None] * self.g_tilde(xp)


@dataclass(frozen=True)
class TimeIndependent(FieldSpec):
    """E_perp = profile(tau, x_perp), no slow time dependence."""

    profile: Callable
    name: str = "time_independent"
    time_independent = True

    def E(self, t, tau, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.profile(tau, x[..., 1:]), dtype=float)
        return np.broadcast_to(out, _shape(t, tau, x) + (3,))

    def drift_primitive_closed(self, t, y):
        t = np.asarray(t, dtype=float)
        return t[..., None] * gyroaverage_E(self, 0.0, y.position())


@dataclass(frozen=True)
class General(FieldSpec):
    """Arbitrary E(t, tau, x) and oscillating B(t, tau, x)."""

    E_fn: Callable
    B_fn: Callable | None = None
    name: str = "general"

    def E(self, t, tau, x):
        return np.broadcast_to(np.asarray(self.E_fn(t, tau, x), dtype=float), _shape(t, tau, x) + (3,))

    def B(self, t, tau, x):
        if self.B_fn is None:
            return super().B(t, tau, x)
        return np.broadcast_to(np.asarray(self.B_fn(t, tau, x), dtype=float), _shape(t, tau, x) + (3,))


def eval_E(spec, t, tau, x):
    if not isinstance(spec, FieldSpec):
        raise ConfigurationError(f"not a field scenario: {spec!r}")
    return spec.E(t, tau, x)


def eval_B(spec, t, tau, x):
    """Oscillating magnetic part only; the guide field e1/eps is excluded."""
    if not isinstance(spec, FieldSpec):
        raise ConfigurationError(f"not a field scenario: {spec!r}")
    return spec.B(t, tau, x)


def _gyroaverage(fn, t, x, n):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    taus = periodic_nodes(n)
    values = fn(t[..., None], taus, x[..., None, :])
    values = np.broadcast_to(values, np.broadcast_shapes(t.shape, x.shape[:-1]) + (n, 3))
    return rotate(values, taus).mean(axis=-2)


def gyroaverage_E(spec, t, x, n=DEFAULT_TAU_NODES):
    """Ẽ(t, x) = (1/2 pi) int_0^{2 pi} rotate(E(t, tau, x), tau) dtau."""
    return _gyroaverage(spec.E, t, x, n)


def gyroaverage_B(spec, t, x, n=DEFAULT_TAU_NODES):
    """B̃(t, x), the same average applied to the oscillating magnetic part."""
    return _gyroaverage(spec.B, t, x, n)


def drift_L(spec, s, t, y, method="auto"):
    """L(s, t, y) = int_s^t Ẽ(sigma, y) dsigma (signed; s > t allowed).

    ``method="auto"`` uses the scenario's registered primitive when present
    and adaptive Gauss-Kronrod quadrature (rtol 1e-10) otherwise;
    ``method="quad"`` forces quadrature.
    """
    if method not in ("auto", "quad"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        closed = spec.drift_primitive_closed(np.array([s, t], dtype=float), y)
        if closed is not None:
            return closed[1] - closed[0]
    if s == t:
        return np.zeros(3)
    x = y.position()
    lo, hi, sign = (s, t, 1.0) if s < t else (t, s, -1.0)
    val, _ = integrate.quad_vec(lambda sig: gyroaverage_E(spec, sig, x), lo, hi, epsrel=DRIFT_RTOL, epsabs=1e-14)
    return sign * val


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def drift_primitive(spec, times, y, max_panel=0.05):
    """P(t) = L(0, t, y) at an array of times, shape (len(times), 3).

    Closed form when registered; otherwise composite 12-point Gauss-Legendre
    on panels of width <= ``max_panel`` between the sorted times.
    """
    times = np.asarray(times, dtype=float)
    closed = spec.drift_primitive_closed(times, y)
    if closed is not None:
        return np.asarray(closed, dtype=float).reshape(times.shape + (3,))
    flat = times.ravel()
    order = np.argsort(flat, kind="stable")
    knots = np.concatenate([[0.0], flat[order]])
    x = y.position()
    increments = np.zeros((len(flat), 3))
    for i in range(len(flat)):
        a, b = knots[i], knots[i + 1]
        if b == a:
            continue
        lo, hi, sign = (a, b, 1.0) if a < b else (b, a, -1.0)
        npan = max(1, int(np.ceil((hi - lo) / max_panel)))
        edges = np.linspace(lo, hi, npan + 1)
        half = 0.5 * np.diff(edges)
        nodes = (edges[:-1, None] + half[:, None] * (_GL_X[None, :] + 1.0)).ravel()
        weights = (half[:, None] * _GL_W[None, :]).ravel()
        vals = gyroaverage_E(spec, nodes, np.broadcast_to(x, nodes.shape + (3,)))
        increments[i] = sign * (weights @ vals)
    cumulative = np.cumsum(increments, axis=0)
    out = np.empty_like(cumulative)
    out[order] = cumulative
    return out.reshape(times.shape + (3,))


@dataclass
class Check:
    name: str
    passed: bool
    worst: float


@dataclass
class AssumptionReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_assumptions(spec, f0=None, n_samples=20, seed=0, tol=1e-10, t_range=(0.0, 2.0)):
    """Sample-based check of the hypotheses behind the closed-form limit.

    Checks periodicity in tau, Ẽ_par = 0, B̃ = 0, Ẽ independent of x1 and,
    when ``f0`` is given (an initial-data object or a callable f0(x, v)),
    invariance of f0 under rotation of v. Failures are report entries.
    """
    rng = np.random.default_rng(seed)
    t = rng.uniform(*t_range, n_samples)
    tau = rng.uniform(0.0, 2 * np.pi, n_samples)
    x = rng.normal(0.0, 1.0, (n_samples, 3))
    report = AssumptionReport()

    def add(name, worst, scale=1.0):
        worst = float(worst)
        report.checks.append(Check(name, bool(worst <= tol * max(scale, 1.0)), worst))

    e0 = spec.E(t, tau, x)
    add("E periodic in tau", np.abs(spec.E(t, tau + 2 * np.pi, x) - e0).max(), np.abs(e0).max())
    b0 = spec.B(t, tau, x)
    add("B periodic in tau", np.abs(spec.B(t, tau + 2 * np.pi, x) - b0).max(), np.abs(b0).max())
    et = gyroaverage_E(spec, t, x)
    add("gyroaveraged E has no parallel part", np.abs(et[:, 0]).max())
    add("gyroaveraged B vanishes", np.abs(gyroaverage_B(spec, t, x)).max())
    shifted = x.copy()
    shifted[:, 0] += rng.normal(0.0, 3.0, n_samples)
    add("gyroaveraged E independent of x1", np.abs(gyroaverage_E(spec, t, shifted) - et).max())
    if f0 is not None:
        fn = f0.f0 if hasattr(f0, "f0") else f0
        xs = rng.normal(0.0, 1.0, (n_samples, 3))
        vs = rng.normal(0.0, 1.0, (n_samples, 3))
        # always include v = e2 against its quarter-turn image e3
        vs[0] = [0.0, 1.0, 0.0]
        theta = rng.uniform(0.0, 2 * np.pi, n_samples)
        theta[0] = np.pi / 2
        a = fn(xs, vs)
        b = fn(xs, rotate(vs, theta))
        add("f0 gyro-symmetric in v", np.abs(a - b).max(), np.abs(a).max())
    return report


# scenario registry -------------------------------------------------------


def _circular(amplitude=1.0):
    return CircularResonant(amplitude=float(amplitude))


def _time_independent(resonant=(1.0, 0.0), counter=0.0, ell=None):
    """Resonant part a2 rotate(e2,-tau) + a3 rotate(e3,-tau) plus a
    counter-rotating part that averages out; optional Gaussian envelope in
    x_perp of length ``ell``."""
    a2, a3 = (float(c) for c in resonant)
    counter = float(counter)
    ell = None if ell is None else float(ell)

    def profile(tau, xp):
        tau = np.asarray(tau, dtype=float)
        xp = np.asarray(xp, dtype=float)
        env = 1.0 if ell is None else np.exp(-np.sum(xp * xp, axis=-1) / (2 * ell * ell))[..., None]
        shape = np.broadcast_shapes(tau.shape, xp.shape[:-1])
        tau = np.broadcast_to(tau, shape)
        out = a2 * rotate(E2, -tau) + a3 * rotate(np.array([0.0, 0.0, 1.0]), -tau) + counter * rotate(E2, tau)
        return env * out

    return TimeIndependent(profile=profile, name="time_independent")


def _resonant_angular(counter=0.0):
    def g(tau, xp):
        tau = np.asarray(tau, dtype=float)
        shape = np.broadcast_shapes(tau.shape, np.shape(xp)[:-1])
        tau = np.broadcast_to(tau, shape)
        return rotate(E2, -tau) + counter * rotate(E2, tau)

    return g


def _separable_linear(e0=1.0, e1=0.5, counter=0.0):
    e0, e1 = float(e0), float(e1)
    return Separable(
        scalar_profile=lambda t, xp: np.broadcast_to(e0 + e1 * np.asarray(t, dtype=float), np.broadcast_shapes(np.shape(t), np.shape(xp)[:-1])),
        angular_profile=_resonant_angular(float(counter)),
        primitive=lambda t, xp: e0 * np.asarray(t, dtype=float) + 0.5 * e1 * np.asarray(t, dtype=float) ** 2,
        name="separable_linear",
    )


def _separable_cos(omega=1.0, amplitude=1.0, counter=0.0):
    omega, amplitude = float(omega), float(amplitude)
    return Separable(
        scalar_profile=lambda t, xp: np.broadcast_to(amplitude * np.cos(omega * np.asarray(t, dtype=float)), np.broadcast_shapes(np.shape(t), np.shape(xp)[:-1])),
        angular_profile=_resonant_angular(float(counter)),
        primitive=lambda t, xp: amplitude * np.sin(omega * np.asarray(t, dtype=float)) / omega,
        name="separable_cos",
    )


def _zero():
    return General(E_fn=lambda t, tau, x: np.zeros(_shape(t, tau, x) + (3,)), name="zero")


def _general_perturbed(amplitude=1.0, b_amplitude=0.1, gradient=0.0):
    """Resonant E with an x_perp-gradient in its amplitude and a
    co-rotating B perturbation whose gyroaverage is zero."""
    amplitude, b_amplitude, gradient = float(amplitude), float(b_amplitude), float(gradient)

    def e_fn(t, tau, x):
        x = np.asarray(x, dtype=float)
        shape = _shape(t, tau, x)
        tau = np.broadcast_to(tau, shape)
        amp = amplitude * (1.0 + gradient * np.broadcast_to(x[..., 1], shape))
        return amp[..., None] * rotate(E2, -tau)

    def b_fn(t, tau, x):
        shape = _shape(t, tau, x)
        return b_amplitude * rotate(E2, np.broadcast_to(tau, shape))

    return General(E_fn=e_fn, B_fn=b_fn, name="general_perturbed")


SCENARIOS = {
    "circular_resonant": _circular,
    "time_independent": _time_independent,
    "separable_linear": _separable_linear,
    "separable_cos": _separable_cos,
    "zero": _zero,
    "general_perturbed": _general_perturbed,
}


def make_scenario(name, **params):
    """Build a registered scenario by name."""
    try:
        factory = SCENARIOS[name]
    except KeyError:
        raise ConfigurationError(f"unknown scenario {name!r}; known: {sorted(SCENARIOS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for scenario {name!r}: {exc}") from None
