"""Particle simulation of the eps-dependent Vlasov equation.

Characteristics: X' = V, V' = E(t, t/eps, X) + V x (B(t, t/eps, X) + e1/eps).
Each step is a Strang splitting: a half kick from E + V x B (implicit
midpoint, Boris form) with fields at the step start, the exact helical flow
of X' = V, V' = V x e1/eps over the full step, then a half kick with fields
at the step end. The flow rotates V by -dt/eps and moves X along the exact
helix, so the stiff part is integrated without error.
"""

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from ._backend import kernels
from .mathcore import E2, rotate


class SamplingError(ValueError):
    """Initial data cannot be sampled as requested."""


@dataclass(frozen=True)
class TensorGrid:
    """Deterministic tensor quadrature, node counts per (x1, x2, x3, v1, v2, v3).

    Gaussian initial data uses Gauss-Hermite nodes scaled to its widths; any
    other data needs ``box`` = six (lo, hi) pairs and uses Gauss-Legendre.
    """

    dims: tuple = (1, 12, 12, 1, 12, 12)
    box: tuple | None = None


@dataclass(frozen=True)
class MonteCarlo:
    count: int = 10_000
    seed: int = 0


@dataclass(frozen=True)
class EnsembleConfig:
    """Run parameters; ``dt`` defaults to eps/16 and may not exceed eps/8.

    ``magnetic`` scales the guide field e1/eps (0 switches it off).
    """

    eps: float
    T: float
    dt: float | None = None
    sampling: object = field(default_factory=TensorGrid)
    magnetic: float = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not (np.isfinite(self.T) and self.T >= 0):
            raise ValueError(f"T must be finite and >= 0, got {self.T}")
        if self.dt is None:
            object.__setattr__(self, "dt", self.eps / 16)
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.dt > self.eps / 8 * (1 + 1e-12):
            raise ValueError(f"dt = {self.dt} exceeds eps/8 = {self.eps / 8}")

    @property
    def omega(self):
        return self.magnetic / self.eps

    def steps(self):
        """Number of steps; dt is shrunk if needed so that it divides T."""
        return int(np.ceil(self.T / self.dt - 1e-9)) if self.T > 0 else 0

    def step_size(self):
        n = self.steps()
        return self.T / n if n else self.dt


@dataclass
class Particle:
    x: np.ndarray
    v: np.ndarray
    w: float = 1.0
    f0_value: float = 1.0


@dataclass
class Snapshot:
    t: float
    x: np.ndarray
    v: np.ndarray
    w: np.ndarray
    f0_value: np.ndarray


def _fields(spec, t, eps, x):
    tau = t / eps
    e = np.ascontiguousarray(spec.E(t, tau, x), dtype=float).reshape(-1, 3)
    b = np.ascontiguousarray(spec.B(t, tau, x), dtype=float).reshape(-1, 3)
    return e, b


def _step(x, v, t, h, cfg, spec, start_fields=None):
    """One kick-flight-kick step in place; returns the fields at the step end."""
    e, b = start_fields if start_fields is not None else _fields(spec, t, cfg.eps, x)
    kernels.boris_kick(v, e, b, 0.5 * h)
    kernels.gyro_flight(x, v, h, cfg.omega)
    end = _fields(spec, t + h, cfg.eps, x)
    kernels.boris_kick(v, end[0], end[1], 0.5 * h)
    return end


def push(p, t, cfg, spec):
    """Advance one particle by one step of size cfg.dt from time t."""
    x = np.array(p.x, dtype=float).reshape(1, 3)
    v = np.array(p.v, dtype=float).reshape(1, 3)
    _step(x, v, t, cfg.dt, cfg, spec)
    return replace(p, x=x[0], v=v[0])


def push_arrays(x, v, t0, nsteps, h, cfg, spec, callback=None):
    """Advance arrays in place; ``callback(n, t)`` after each step."""
    fields = None
    for n in range(nsteps):
        fields = _step(x, v, t0 + n * h, h, cfg, spec, fields)
        if callback is not None:
            callback(n + 1, t0 + (n + 1) * h)


def _gauss_axis(center, width, n):
    xi, om = np.polynomial.hermite.hermgauss(n)
    nodes = center + np.sqrt(2.0) * width * xi
    weights = np.sqrt(2.0) * width * om * np.exp(xi * xi)
    return nodes, weights


def _tensor(axes):
    nodes = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    weights = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    pts = np.stack([n.ravel() for n in nodes], axis=-1)
    w = np.prod(np.stack([q.ravel() for q in weights], axis=-1), axis=-1)
    return pts, w


def sample_initial(data, sampling):
    """Phase-space points (N, 6), quadrature weights and f0 values."""
    if isinstance(sampling, TensorGrid):
        if len(sampling.dims) != 6 or min(sampling.dims) < 1:
            raise SamplingError(f"dims must be six positive counts, got {sampling.dims}")
        if sampling.box is None:
            if not hasattr(data, "width_x"):
                raise SamplingError("non-Gaussian initial data needs an explicit sampling box")
            c = data.center_x
            centers = (c[0], c[1], c[2], 0.0, 0.0, 0.0)
            widths = (data.width_x,) * 3 + (data.width_vpar, data.width_vperp, data.width_vperp)
            axes = [_gauss_axis(cc, ww, n) for cc, ww, n in zip(centers, widths, sampling.dims)]
        else:
            axes = []
            for (lo, hi), n in zip(sampling.box, sampling.dims):
                xg, wg = np.polynomial.legendre.leggauss(n)
                axes.append((0.5 * (hi + lo) + 0.5 * (hi - lo) * xg, 0.5 * (hi - lo) * wg))
        pts, w = _tensor(axes)
    elif isinstance(sampling, MonteCarlo):
        if not hasattr(data, "width_x"):
            raise SamplingError("Monte Carlo sampling is implemented for Gaussian initial data")
        rng = np.random.default_rng(sampling.seed)
        c = np.array(data.center_x, dtype=float)
        scale = np.array([data.width_x] * 3 + [data.width_vpar, data.width_vperp, data.width_vperp])
        pts = np.concatenate([c, np.zeros(3)]) + scale * rng.standard_normal((sampling.count, 6))
        mass = data.amplitude * (2 * np.pi) ** 3 * np.prod(scale)
        f = data.f0(pts[:, :3], pts[:, 3:])
        w = mass / sampling.count / f
    else:
        raise SamplingError(f"unknown sampling {sampling!r}")
    f0v = np.asarray(data.f0(pts[:, :3], pts[:, 3:]), dtype=float)
    keep = f0v > 0
    if not keep.any():
        raise SamplingError("initial data vanishes on every sample point")
    return pts[keep], w[keep], f0v[keep]


@dataclass
class EnsembleTrajectory:
    snapshots: list
    eps: float
    dt: float

    def at(self, t):
        for s in self.snapshots:
            if abs(s.t - t) <= 1e-9 * max(1.0, abs(t)):
                return s
        raise KeyError(f"no snapshot at t = {t}")

    def times(self):
        return np.array([s.t for s in self.snapshots])


def simulate_ensemble(data, cfg, spec, snapshot_times=None, every_step=False):
    """Sample f0, push every particle to cfg.T and keep snapshots.

    Snapshots are taken at t = 0, cfg.T and every time in ``snapshot_times``
    (which must lie on the step grid), or at every step if ``every_step``.
    """
    pts, w, f0v = sample_initial(data, cfg.sampling)
    x = np.ascontiguousarray(pts[:, :3])
    v = np.ascontiguousarray(pts[:, 3:])
    nsteps = cfg.steps()
    h = cfg.step_size()
    wanted = set()
    for t in snapshot_times or ():
        n = int(round(t / h))
        if abs(n * h - t) > 1e-9 * max(1.0, t) or n > nsteps or n < 0:
            raise ValueError(f"snapshot time {t} is not on the step grid")
        wanted.add(n)
    wanted.add(nsteps)
    snaps = [Snapshot(0.0, x.copy(), v.copy(), w, f0v)]

    def keep(n, t):
        if every_step or n in wanted:
            snaps.append(Snapshot(t, x.copy(), v.copy(), w, f0v))

    push_arrays(x, v, 0.0, nsteps, h, cfg, spec, keep)
    if nsteps == 0:
        snaps = snaps[:1]
    return EnsembleTrajectory(snaps, cfg.eps, h)


def observable(snapshot, psi):
    """sum_i w_i f0_i psi(x_i, v_i)."""
    return float(np.sum(snapshot.w * snapshot.f0_value * psi(snapshot.x, snapshot.v)))


def two_scale_observable(trajectory, psi, eps):
    """int_0^T sum_i w_i f0_i psi(t, t/eps mod 2 pi, x_i, v_i) dt by the trapezoid over snapshots."""
    times = trajectory.times()
    vals = np.array([np.sum(s.w * s.f0_value * psi(s.t, np.mod(s.t / eps, 2 * np.pi), s.x, s.v)) for s in trajectory.snapshots])
    return float(np.sum(0.5 * np.diff(times) * (vals[1:] + vals[:-1])))


def resonance_reference(v0, t, eps):
    """Exact V(t) for E = rotate(e2, -t/eps) and the rate d|V|^2/dt."""
    v0 = np.asarray(v0, dtype=float)
    if v0[0] != 0.0:
        raise ValueError("the resonance reference needs v0 perpendicular to e1")
    V = rotate(v0 + t * E2, -t / eps)
    return V, 2.0 * (v0[1] + t)


def resonance_position(x0, v0, t, eps):
    """Exact X(t) for the same resonant motion."""
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    w0 = v0[1] + 1j * v0[2]
    ph = np.exp(-1j * t / eps)
    d = 1j * eps * (w0 * (ph - 1.0) + t * ph) + eps * eps * (ph - 1.0)
    return x0 + np.array([v0[0] * t, d.real, d.imag])


def write_snapshots_csv(path, snapshots, stride=1):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x1", "x2", "x3", "v1", "v2", "v3", "w", "f0_value"])
        for s in snapshots:
            for i in range(0, len(s.w), stride):
                w.writerow([repr(float(s.t))] + [repr(float(c)) for c in s.x[i]] + [repr(float(c)) for c in s.v[i]]
                           + [repr(float(s.w[i])), repr(float(s.f0_value[i]))])
