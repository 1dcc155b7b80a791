"""Built-in smooth test functions psi(x, v) with closed-form moments.

Each entry knows int f0 psi dx dv for a GaussianProduct f0, which gives a
t = 0 sanity value for every observable.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mathcore import rotate


@dataclass(frozen=True)
class PsiFunction:
    name: str
    fn: Callable
    moment: Callable  # GaussianProduct -> int f0 psi

    def __call__(self, x, v):
        return self.fn(np.asarray(x, dtype=float), np.asarray(v, dtype=float))


def _axis(w, c, b):
    """int exp(-(z-c)^2/2w^2) exp(-z^2/2b^2) dz."""
    s2 = w * w + b * b
    return np.sqrt(2 * np.pi) * w * b / np.sqrt(s2) * np.exp(-c * c / (2 * s2))


def _mass_parts(d):
    gx = np.sqrt(2 * np.pi) * d.width_x
    return gx, np.sqrt(2 * np.pi) * d.width_vpar, 2 * np.pi * d.width_vperp ** 2


def one():
    def moment(d):
        gx, gv1, gvp = _mass_parts(d)
        return d.amplitude * gx ** 3 * gv1 * gvp

    return PsiFunction("one", lambda x, v: np.ones(x.shape[:-1]), moment)


def gauss_xperp(b=1.0):
    """exp(-|x_perp|^2 / 2b^2): depends on position across the field only."""

    def fn(x, v):
        return np.exp(-(x[..., 1] ** 2 + x[..., 2] ** 2) / (2 * b * b))

    def moment(d):
        gx, gv1, gvp = _mass_parts(d)
        c = d.center_x
        return d.amplitude * gx * _axis(d.width_x, c[1], b) * _axis(d.width_x, c[2], b) * gv1 * gvp

    return PsiFunction(f"gauss_xperp(b={b})", fn, moment)


def vperp2_gauss_xperp(b=1.0):
    """|v_perp|^2 exp(-|x_perp|^2 / 2b^2) (kinetic energy across the field)."""
    base = gauss_xperp(b)

    def fn(x, v):
        return base.fn(x, v) * (v[..., 1] ** 2 + v[..., 2] ** 2)

    return PsiFunction(f"vperp2_gauss_xperp(b={b})", fn, lambda d: base.moment(d) * 2 * d.width_vperp ** 2)


def gauss_phase(b=1.0, beta=1.0):
    """exp(-|x|^2/2b^2 - |v|^2/2beta^2), a bump in all of phase space."""

    def fn(x, v):
        return np.exp(-np.sum(x * x, axis=-1) / (2 * b * b) - np.sum(v * v, axis=-1) / (2 * beta * beta))

    def moment(d):
        c = d.center_x
        xs = np.prod([_axis(d.width_x, c[i], b) for i in range(3)])
        vs = _axis(d.width_vpar, 0.0, beta) * _axis(d.width_vperp, 0.0, beta) ** 2
        return d.amplitude * xs * vs

    return PsiFunction(f"gauss_phase(b={b},beta={beta})", fn, moment)


def gauss_parallel(b=1.0, beta=1.0):
    """exp(-x1^2/2b^2 - |v|^2/2beta^2): blind to x_perp and to the gyrophase."""

    def fn(x, v):
        return np.exp(-x[..., 0] ** 2 / (2 * b * b) - np.sum(v * v, axis=-1) / (2 * beta * beta))

    def moment(d):
        gx = np.sqrt(2 * np.pi) * d.width_x
        vs = _axis(d.width_vpar, 0.0, beta) * _axis(d.width_vperp, 0.0, beta) ** 2
        return d.amplitude * _axis(d.width_x, d.center_x[0], b) * gx * gx * vs

    return PsiFunction(f"gauss_parallel(b={b},beta={beta})", fn, moment)


BUILTIN = {
    "one": one,
    "gauss_xperp": gauss_xperp,
    "vperp2_gauss_xperp": vperp2_gauss_xperp,
    "gauss_phase": gauss_phase,
    "gauss_parallel": gauss_parallel,
}


def make_psi(name, **params):
    try:
        return BUILTIN[name](**params)
    except KeyError:
        raise ValueError(f"unknown test function {name!r}; known: {sorted(BUILTIN)}") from None


def rotating_v2_gauss_xperp(b=1.0):
    """Two-scale test function psi(t, tau, x, v) = exp(-|x_perp|^2/2b^2) rotate(v, tau)_2.

    Not gyro-invariant, so it sees the phase of the gyration.
    """

    def fn(t, tau, x, v):
        return np.exp(-(x[..., 1] ** 2 + x[..., 2] ** 2) / (2 * b * b)) * rotate(v, tau)[..., 1]

    return fn
