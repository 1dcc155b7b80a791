import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlasov_memory import _fallback
from vlasov_memory.mathcore import (
    E2,
    bessel_j0,
    bessel_j0_quad,
    bessel_j1,
    bessel_j1_quad,
    j1_over_z,
    parallel,
    periodic_average,
    perpendicular,
    rotate,
)

# frozen from a 10^4-node trapezoid of the integral definitions
J0_AT_1 = 0.7651976865579665
J1_AT_1 = 0.4400505857449336
J0_FIRST_ZERO = 2.404825557695773  # bisection of the quadrature oracle

finite = st.floats(-1e3, 1e3, allow_nan=False)
angles = st.floats(-20.0, 20.0, allow_nan=False)


def test_rotate_identity():
    v = np.array([0.3, -1.2, 2.5])
    np.testing.assert_array_equal(rotate(v, 0.0), v)


@pytest.mark.parametrize("tau", [0.0, 0.4, 1.0, 2.5, -3.0])
def test_rotate_e2_backwards(tau):
    np.testing.assert_allclose(rotate(E2, -tau), [0.0, np.cos(tau), -np.sin(tau)], atol=1e-15)


@given(st.tuples(finite, finite, finite), angles)
def test_rotate_preserves_norm_and_axis(v, tau):
    v = np.array(v)
    r = rotate(v, tau)
    assert r[0] == v[0]
    np.testing.assert_allclose(np.linalg.norm(r), np.linalg.norm(v), rtol=1e-14, atol=1e-300)


@given(st.tuples(finite, finite, finite), angles, angles)
def test_rotate_group_property(v, tau, sigma):
    v = np.array(v)
    scale = max(np.linalg.norm(v), 1.0)
    np.testing.assert_allclose(rotate(rotate(v, tau), sigma), rotate(v, tau + sigma), atol=1e-13 * scale)
    np.testing.assert_allclose(rotate(rotate(v, tau), -tau), v, atol=1e-14 * scale)


def test_rotate_is_linear():
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=(2, 3))
    np.testing.assert_allclose(rotate(2.0 * a - b, 0.7), 2.0 * rotate(a, 0.7) - rotate(b, 0.7), atol=1e-14)


def test_rotate_broadcasts_over_angles():
    taus = np.linspace(0, 1, 5)
    out = rotate(E2, taus)
    assert out.shape == (5, 3)
    np.testing.assert_allclose(out[:, 1], np.cos(taus))


def test_parallel_perpendicular_decomposition():
    v = np.array([1.5, -2.0, 0.25])
    np.testing.assert_array_equal(parallel(v), [1.5, 0, 0])
    np.testing.assert_array_equal(perpendicular(v), [0, -2.0, 0.25])
    np.testing.assert_array_equal(parallel(v) + perpendicular(v), v)


def test_bessel_reference_values():
    assert bessel_j0(0.0) == 1.0
    assert bessel_j1(0.0) == 0.0
    assert bessel_j0(1.0) == pytest.approx(J0_AT_1, abs=1e-15)
    assert bessel_j1(1.0) == pytest.approx(J1_AT_1, abs=1e-15)
    assert abs(bessel_j0(J0_FIRST_ZERO)) < 1e-9


def test_bessel_matches_quadrature_oracle():
    z = np.linspace(-50, 50, 401)
    np.testing.assert_allclose(bessel_j0(z), bessel_j0_quad(z), atol=1e-10)
    np.testing.assert_allclose(bessel_j1(z), bessel_j1_quad(z), atol=1e-10)


def test_bessel_matches_mpmath():
    mpmath = pytest.importorskip("mpmath")
    z = np.concatenate([np.linspace(0, 60, 241), [3.999999, 4.000001, 24.99999, 25.00001]])
    ref0 = np.array([float(mpmath.besselj(0, x)) for x in z])
    ref1 = np.array([float(mpmath.besselj(1, x)) for x in z])
    np.testing.assert_allclose(bessel_j0(z), ref0, atol=2e-15)
    np.testing.assert_allclose(bessel_j1(z), ref1, atol=2e-15)


def test_bessel_parity_and_bound():
    z = np.linspace(-50, 50, 1001)
    assert np.all(np.abs(bessel_j0(z)) <= 1.0)
    np.testing.assert_array_equal(bessel_j0(z), bessel_j0(-z))
    np.testing.assert_array_equal(bessel_j1(z), -bessel_j1(-z))


@pytest.mark.parametrize("z", [0.5, 1.0, 2.0, 5.0])
def test_j1_is_minus_j0_derivative(z):
    h = 1e-5
    fd = -(bessel_j0(z + h) - bessel_j0(z - h)) / (2 * h)
    assert bessel_j1(z) == pytest.approx(fd, abs=1e-9)


def test_j1_derivative_identity_on_grid():
    z = np.linspace(0, 20, 100)
    h = 1e-5
    fd = -(bessel_j0(z + h) - bessel_j0(z - h)) / (2 * h)
    assert np.max(np.abs(bessel_j1(z) - fd)) <= 1e-8


def test_two_integral_forms_of_j0_agree():
    z = np.linspace(-30, 30, 121)
    np.testing.assert_allclose(bessel_j0_quad(z, form="sin"), bessel_j0_quad(z, form="cos"), atol=1e-10)


def test_j1_over_z_values():
    assert j1_over_z(0.0) == 0.5
    assert j1_over_z(1.0) == pytest.approx(J1_AT_1, abs=1e-15)
    z = np.linspace(-3, 3, 61)
    np.testing.assert_array_equal(j1_over_z(z), j1_over_z(-z))


def test_j1_over_z_seam():
    seam = 1e-2
    below = _fallback.J1_OVER_Z_SEAM
    assert below == seam
    lo = j1_over_z(np.nextafter(seam, 0.0))
    hi = j1_over_z(seam)
    assert abs(lo - hi) <= 1e-12
    # the direct ratio just above the seam agrees with the series just below
    z = np.array([0.0099, 0.0101, 0.02, 0.2])
    np.testing.assert_allclose(j1_over_z(z), bessel_j1(z) / z, atol=1e-15)


def test_periodic_average():
    assert periodic_average(lambda t: np.ones_like(t), 8) == 1.0
    assert abs(periodic_average(np.cos, 16)) < 1e-14
    assert periodic_average(lambda t: np.cos(3.0 * np.sin(t)), 256) == pytest.approx(bessel_j0(3.0), abs=1e-14)
    with pytest.raises(ValueError):
        periodic_average(np.cos, 3)


def test_periodic_average_vector_valued():
    avg = periodic_average(lambda t: rotate(rotate(E2, -t), t), 64)
    np.testing.assert_allclose(avg, E2, atol=1e-15)
