"""Rotations about the magnetic axis, Bessel J0/J1 and periodic quadrature.

Vectors are numpy arrays whose last axis has length 3, ordered
(parallel, perp_2, perp_3) with respect to the magnetic axis e1.
"""

import numpy as np

from ._backend import kernels

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def vec3(c1, c2, c3):
    return np.array([c1, c2, c3], dtype=float)


def parallel(v):
    """Parallel part (v1, 0, 0)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    out[..., 0] = v[..., 0]
    return out


def perpendicular(v):
    """Perpendicular part (0, v2, v3)."""
    v = np.asarray(v, dtype=float)
    out = v.copy()
    out[..., 0] = 0.0
    return out


def rotate(v, tau):
    """Rotate ``v`` by angle ``tau`` about e1.

    rotate(v, tau) = (v1, v2 cos tau - v3 sin tau, v2 sin tau + v3 cos tau).
    Broadcasts over leading axes of ``v`` and over ``tau``.
    """
    v = np.asarray(v, dtype=float)
    tau = np.asarray(tau, dtype=float)
    c, s = np.cos(tau), np.sin(tau)
    v1, v2, v3 = v[..., 0], v[..., 1], v[..., 2]
    return np.stack(np.broadcast_arrays(v1 + 0.0 * c, v2 * c - v3 * s, v2 * s + v3 * c), axis=-1)


def bessel_j0(z):
    """Bessel function of the first kind, order 0 (scalar or array)."""
    out = kernels.j0(z)
    return float(out) if np.ndim(z) == 0 else out


def bessel_j1(z):
    """Bessel function of the first kind, order 1 (scalar or array)."""
    out = kernels.j1(z)
    return float(out) if np.ndim(z) == 0 else out


def j1_over_z(z):
    """J1(z)/z, continuous through z = 0 where it equals 1/2.

    A three-term Taylor series is used for |z| < 1e-2; the division is never
    performed near the removable singularity.
    """
    out = kernels.j1_over_z(z)
    return float(out) if np.ndim(z) == 0 else out


def periodic_nodes(n):
    """Uniform nodes 2 pi j / n, j = 0..n-1."""
    if n < 4:
        raise ValueError(f"periodic quadrature needs n >= 4, got {n}")
    return 2.0 * np.pi * np.arange(n) / n


def periodic_average(g, n=128):
    """Mean of a 2 pi-periodic function over one period (trapezoidal rule).

    ``g`` is called once with the array of nodes and must return values with
    the node axis first (shape (n,) or (n, ...)). Exact to rounding for
    trigonometric polynomials of degree < n.
    """
    taus = periodic_nodes(n)
    values = np.asarray(g(taus))
    return values.mean(axis=0)


def bessel_j0_quad(z, n=10_000, form="sin"):
    """J0 from its integral definition, trapezoid on n nodes (slow oracle).

    ``form="sin"`` uses (1/pi) int_0^pi cos(z sin t) dt,
    ``form="cos"`` uses (1/pi) int_0^pi cos(-z cos t) dt.
    Both integrands are pi-periodic, so the rule converges spectrally.
    """
    z = np.asarray(z, dtype=float)
    tau = np.pi * np.arange(n) / n
    if form == "sin":
        vals = np.cos(z[..., None] * np.sin(tau))
    elif form == "cos":
        vals = np.cos(-z[..., None] * np.cos(tau))
    else:
        raise ValueError(f"unknown form {form!r}")
    out = vals.mean(axis=-1)
    return float(out) if out.ndim == 0 else out


def bessel_j1_quad(z, n=10_000):
    """J1 from (1/2 pi) int_0^{2 pi} cos(z sin t - t) dt (slow oracle)."""
    z = np.asarray(z, dtype=float)
    tau = periodic_nodes(n)
    out = np.cos(z[..., None] * np.sin(tau) - tau).mean(axis=-1)
    return float(out) if out.ndim == 0 else out
