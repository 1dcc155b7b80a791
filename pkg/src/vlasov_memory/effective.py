"""Effective model in Fourier variables.

At fixed y = (v1, x2, x3) the effective unknown h(t, z, y) lives on
z = (x1, v2, v3). With the transform
    Fh(k) = (2 pi)^(-3/2) int h(z) exp(-i k . z) dz
the exact solution is Fh0(k) exp(-i k1 y1 t) J0(|k_perp||L(0, t, y)|), and
the memory equation is
    d_t Fh + i k1 y1 Fh = int_0^t K(sigma, t) Fh(sigma) dsigma.
"""

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._backend import kernels
from .fields import YPoint, drift_primitive
from .kernel import KMode, default_route, kernel_matrix
from .mathcore import bessel_j0

TWO_PI_32 = (2.0 * np.pi) ** 1.5


@dataclass(frozen=True)
class GaussianProduct:
    """f0 = amplitude exp(-|x-c|^2/2wx^2 - v1^2/2wpar^2 - |v_perp|^2/2wperp^2)."""

    center_x: tuple = (0.0, 0.0, 0.0)
    width_x: float = 2.0
    width_vpar: float = 1.0
    width_vperp: float = 2.0
    amplitude: float = 1.0

    def __post_init__(self):
        if min(self.width_x, self.width_vpar, self.width_vperp) <= 0 or self.amplitude <= 0:
            raise ValueError("widths and amplitude must be positive")
        if len(self.center_x) != 3:
            raise ValueError("center_x must have three components")

    def f0(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        dx = x - np.asarray(self.center_x, dtype=float)
        q = (np.sum(dx * dx, axis=-1) / self.width_x ** 2 + v[..., 0] ** 2 / self.width_vpar ** 2
             + (v[..., 1] ** 2 + v[..., 2] ** 2) / self.width_vperp ** 2)
        return self.amplitude * np.exp(-0.5 * q)

    def y_factor(self, y):
        c = self.center_x
        q = ((y.x2 - c[1]) ** 2 + (y.x3 - c[2]) ** 2) / self.width_x ** 2 + y.v1 ** 2 / self.width_vpar ** 2
        return self.amplitude * np.exp(-0.5 * q)

    def fhat0(self, k, y):
        """Closed-form transform in z at fixed y; ``k`` is a KMode or (..., 3) array."""
        k = k.vector if isinstance(k, KMode) else np.asarray(k, dtype=float)
        kp2 = k[..., 1] ** 2 + k[..., 2] ** 2
        env = np.exp(-0.5 * (k[..., 0] ** 2 * self.width_x ** 2 + kp2 * self.width_vperp ** 2))
        out = self.y_factor(y) * self.width_x * self.width_vperp ** 2 * env * np.exp(-1j * k[..., 0] * self.center_x[0])
        return complex(out) if np.ndim(out) == 0 else out

    def l2_norm_sq(self):
        """int f0^2 dx dv."""
        return self.amplitude ** 2 * np.pi ** 3 * self.width_x ** 3 * self.width_vpar * self.width_vperp ** 2


@dataclass(frozen=True)
class UserInitialData:
    """User-supplied f0(x, v) and its transform fhat0(k, y)."""

    f0_fn: Callable
    fhat0_fn: Callable

    def f0(self, x, v):
        return self.f0_fn(x, v)

    def fhat0(self, k, y):
        return self.fhat0_fn(k, y)


def fourier_initial(data, mode, y):
    return data.fhat0(mode, y)


def fourier_initial_quadrature(data, mode, y, half_width=12.0, n=64):
    """Oracle: tensor Gauss-Legendre transform of h0 over a box in z."""
    xg, wg = np.polynomial.legendre.leggauss(n)
    c1 = data.center_x[0] if hasattr(data, "center_x") else 0.0
    z1 = c1 + half_width * xg
    zp = half_width * xg
    w = half_width * wg
    Z1, Z2, Z3 = np.meshgrid(z1, zp, zp, indexing="ij")
    W = w[:, None, None] * w[None, :, None] * w[None, None, :]
    x = np.stack([Z1, np.full_like(Z1, y.x2), np.full_like(Z1, y.x3)], axis=-1)
    v = np.stack([np.full_like(Z1, y.v1), Z2, Z3], axis=-1)
    k = mode.vector
    phase = np.exp(-1j * (k[0] * Z1 + k[1] * Z2 + k[2] * Z3))
    return complex(np.sum(W * data.f0(x, v) * phase) / TWO_PI_32)


def exact_fourier_solution(spec, data, t, mode, y):
    """Fh0 exp(-i k1 y1 t) J0(|k_perp||L(0, t, y)|)."""
    p = drift_primitive(spec, np.array([float(t)]), y)[0]
    a = bessel_j0(mode.kperp * np.linalg.norm(p))
    return fourier_initial(data, mode, y) * np.exp(-1j * mode.k1 * y.v1 * t) * a


@dataclass
class SpectralState:
    t: float
    modes: list
    y: YPoint
    amplitudes: np.ndarray
    history_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    history: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=complex))


@dataclass
class SpectralTrajectory:
    """Amplitudes Fh(t_n, k_m, y) with shape (len(times), len(modes))."""

    times: np.ndarray
    modes: list
    y: YPoint
    amplitudes: np.ndarray
    route: str
    kvecs: np.ndarray | None = None

    def state(self, index=-1):
        index = range(len(self.times))[index]
        return SpectralState(float(self.times[index]), self.modes, self.y, self.amplitudes[index],
                             self.times[:index + 1], self.amplitudes[:index + 1])

    def mode_vectors(self):
        if self.kvecs is None:
            self.kvecs = np.array([m.vector for m in self.modes])
        return self.kvecs

    def to_csv(self, path, time_stride=1, mode_indices=None):
        idx = range(len(self.modes)) if mode_indices is None else mode_indices
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "k1", "kperp", "y1", "y2", "y3", "re", "im", "route"])
            for n in range(0, len(self.times), time_stride):
                for m in idx:
                    a = self.amplitudes[n, m]
                    w.writerow([repr(float(self.times[n])), self.modes[m].k1, repr(self.modes[m].kperp),
                                self.y.v1, self.y.x2, self.y.x3, repr(float(a.real)), repr(float(a.imag)), self.route])


def _initial_amplitudes(data, modes, y):
    if isinstance(data, GaussianProduct):
        return np.asarray(data.fhat0(np.array([m.vector for m in modes]), y), dtype=complex).reshape(len(modes))
    return np.array([fourier_initial(data, m, y) for m in modes], dtype=complex)


def exact_amplitudes(spec, data, times, kvecs, y):
    """Closed-form Fh(t, k, y) for arbitrary times and an (M, 3) array of k."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    kvecs = np.asarray(kvecs, dtype=float)
    plen = np.linalg.norm(drift_primitive(spec, times, y), axis=-1)
    kp = np.hypot(kvecs[:, 1], kvecs[:, 2])
    if isinstance(data, GaussianProduct):
        h0 = data.fhat0(kvecs, y)
    else:
        h0 = np.array([data.fhat0(KMode.from_vector(k), y) for k in kvecs], dtype=complex)
    return kernels.j0(np.outer(plen, kp)) * np.exp(-1j * np.outer(times, kvecs[:, 0]) * y.v1) * h0[None, :]


def exact_trajectory(spec, data, modes, T, dt, y):
    """Closed-form amplitudes on the time grid of solve_memory_equation."""
    times = _time_grid(T, dt)
    p = drift_primitive(spec, times, y)
    plen = np.linalg.norm(p, axis=-1)
    k1 = np.array([m.k1 for m in modes])
    kp = np.array([m.kperp for m in modes])
    amp = kernels.j0(np.outer(plen, kp)) * np.exp(-1j * np.outer(times, k1) * y.v1)
    return SpectralTrajectory(times, list(modes), y, amp * _initial_amplitudes(data, modes, y)[None, :], "exact")


def _time_grid(T, dt):
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    if dt > T:
        raise ValueError(f"time step {dt} exceeds horizon {T}")
    nsteps = int(round(T / dt))
    if abs(nsteps * dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"horizon {T} is not a multiple of the step {dt}")
    return dt * np.arange(nsteps + 1)


def unit_response(spec, y, kperp, dt, nsteps, route):
    """g(t_n) for g' = int_0^t K̃(sigma, t) g(sigma) dsigma, g(0) = 1."""
    if kperp == 0.0:
        return np.ones(nsteps + 1, dtype=complex)
    kmat = kernel_matrix(spec, y, KMode(0.0, kperp), dt, nsteps, route)
    return kernels.heun_memory(np.ascontiguousarray(kmat), 1.0 + 0.0j, dt)


def solve_memory_equation(spec, data, modes, T, dt, y, kernel_route=None, workers=1):
    """Advance every mode of the memory equation with Heun and trapezoidal memory.

    The streaming phase is factored out (g = exp(i k1 y1 t) Fh), so free
    streaming is exact. K̃ is real and depends on the mode only through
    |k_perp|, and the equation is linear, so one scalar solve per distinct
    |k_perp| is scaled by each mode's initial amplitude. ``workers`` > 1 maps
    the distinct |k_perp| values over threads; results do not depend on it.
    """
    route = kernel_route or default_route(spec)
    times = _time_grid(T, dt)
    nsteps = len(times) - 1
    kps = sorted({m.kperp for m in modes})

    def solve(kp):
        return unit_response(spec, y, kp, dt, nsteps, route)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            responses = dict(zip(kps, pool.map(solve, kps)))
    else:
        responses = {kp: solve(kp) for kp in kps}
    g0 = _initial_amplitudes(data, modes, y)
    amps = np.empty((len(times), len(modes)), dtype=complex)
    for j, m in enumerate(modes):
        amps[:, j] = g0[j] * responses[m.kperp] * np.exp(-1j * m.k1 * y.v1 * times)
    return SpectralTrajectory(times, list(modes), y, amps, route)


def relative_mode_errors(numeric, exact):
    """Per mode: max_t |numeric - exact| / |Fh0(k)|; modes with Fh0 = 0 give 0."""
    scale = np.abs(exact.amplitudes[0])
    err = np.abs(numeric.amplitudes - exact.amplitudes).max(axis=0)
    return np.where(scale > 0, err / np.where(scale > 0, scale, 1.0), 0.0)


@dataclass(frozen=True)
class ModeGrid:
    """Uniform Cartesian k-grid: per axis k_j = -k_max + j dk, dk = 2 k_max / n."""

    k_max: float = 4.0
    n: int = 32

    @property
    def dk(self):
        return 2.0 * self.k_max / self.n

    def axis(self):
        return -self.k_max + self.dk * np.arange(self.n)

    def vectors(self):
        a = self.axis()
        return np.stack(np.meshgrid(a, a, a, indexing="ij"), axis=-1).reshape(-1, 3)

    def modes(self):
        return [KMode.from_vector(k) for k in self.vectors()]


def _uniform_spacing(vectors):
    vectors = np.asarray(vectors, dtype=float)
    spacing = []
    for c in range(3):
        vals = np.unique(np.round(vectors[:, c], 12))
        if vals.size == 1:
            spacing.append(1.0)
            continue
        d = np.diff(vals)
        if np.abs(d - d[0]).max() > 1e-9 * max(1.0, abs(d[0])):
            raise ValueError("mode set is not a uniform Cartesian grid")
        spacing.append(d[0])
    counts = [np.unique(np.round(vectors[:, c], 12)).size for c in range(3)]
    if int(np.prod(counts)) != len(vectors):
        raise ValueError("mode set is not a full Cartesian grid")
    return float(np.prod(spacing))


def reconstruct_physical(trajectory, z_grid, y=None, index=-1, chunk=4096):
    """Inverse transform at points z = (x1, v2, v3) for the trajectory's y.

    Returns (real values, max imaginary residue). The modes must form a
    uniform Cartesian grid; the sum is the discrete inverse transform with
    cell volume dk^3.
    """
    if y is not None and y != trajectory.y:
        raise ValueError("trajectory was computed at a different y")
    k = trajectory.mode_vectors()
    cell = _uniform_spacing(k)
    amps = trajectory.amplitudes[index]
    z = np.atleast_2d(np.asarray(z_grid, dtype=float))
    out = np.empty(len(z), dtype=complex)
    for start in range(0, len(z), chunk):
        zc = z[start:start + chunk]
        out[start:start + chunk] = np.exp(1j * zc @ k.T) @ amps
    out *= cell / TWO_PI_32
    return out.real, float(np.abs(out.imag).max()) if out.size else 0.0


def write_reconstruction_csv(path, t, z_grid, y, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x1", "v2", "v3", "v1", "x2", "x3", "f"])
        for z, f in zip(np.atleast_2d(z_grid), values):
            w.writerow([repr(float(t)), repr(float(z[0])), repr(float(z[1])), repr(float(z[2])), y.v1, y.x2, y.x3, repr(float(f))])
