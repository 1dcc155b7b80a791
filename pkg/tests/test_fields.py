import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlasov_memory.fields import (
    SCENARIOS,
    CircularResonant,
    ConfigurationError,
    General,
    Separable,
    YPoint,
    drift_L,
    drift_primitive,
    eval_B,
    eval_E,
    gyroaverage_B,
    gyroaverage_E,
    make_scenario,
    validate_assumptions,
)
from vlasov_memory.mathcore import E2, rotate

LIMIT_SCENARIOS = ["circular_resonant", "time_independent", "separable_linear", "separable_cos", "zero"]
Y = YPoint(0.3, 0.2, -0.4)


def test_circular_resonant_value():
    spec = CircularResonant(1.0)
    x = np.array([0.1, 0.2, 0.3])
    np.testing.assert_allclose(eval_E(spec, 0.7, 0.0, x), E2, atol=1e-15)
    for t in [0.0, 0.4, 1.3]:
        np.testing.assert_allclose(eval_E(spec, t, t / 0.1, x), rotate(E2, -t / 0.1), atol=1e-15)
    np.testing.assert_array_equal(eval_B(spec, 0.7, 0.3, x), 0.0)


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_periodicity(name):
    spec = make_scenario(name)
    rng = np.random.default_rng(3)
    t, tau = rng.uniform(0, 2, 10), rng.uniform(0, 7, 10)
    x = rng.normal(size=(10, 3))
    np.testing.assert_allclose(eval_E(spec, t, tau + 2 * np.pi, x), eval_E(spec, t, tau, x), atol=1e-12)
    np.testing.assert_allclose(eval_B(spec, t, tau + 2 * np.pi, x), eval_B(spec, t, tau, x), atol=1e-12)


def test_separable_is_scalar_multiple():
    g = lambda tau, xp: rotate(E2, -np.broadcast_to(tau, np.broadcast_shapes(np.shape(tau), np.shape(xp)[:-1])))
    spec = Separable(scalar_profile=lambda t, xp: 2.0 + 0.0 * np.asarray(t), angular_profile=g)
    x = np.array([0.0, 0.5, -0.5])
    np.testing.assert_allclose(eval_E(spec, 0.3, 1.1, x), 2.0 * g(1.1, x[1:]), atol=1e-15)


def test_unknown_scenario_is_config_error():
    with pytest.raises(ConfigurationError):
        make_scenario("nope")
    with pytest.raises(ConfigurationError):
        make_scenario("circular_resonant", bogus=1)
    with pytest.raises(ConfigurationError):
        eval_E("circular_resonant", 0.0, 0.0, np.zeros(3))


def test_gyroaverage_circular_is_e2():
    np.testing.assert_allclose(gyroaverage_E(CircularResonant(1.0), 0.5, np.ones(3)), E2, atol=1e-15)


def test_gyroaverage_of_tau_constant_field_vanishes():
    spec = General(E_fn=lambda t, tau, x: np.broadcast_to(E2, np.broadcast_shapes(np.shape(t), np.shape(tau), np.shape(x)[:-1]) + (3,)))
    assert np.abs(gyroaverage_E(spec, 0.2, np.zeros(3))).max() < 1e-14


def test_gyroaverage_separable_matches_g_tilde():
    spec = make_scenario("separable_linear", e0=1.0, e1=0.5, counter=0.7)
    x = np.array([0.0, 0.3, 0.1])
    for t in [0.0, 0.8, 2.0]:
        np.testing.assert_allclose(gyroaverage_E(spec, t, x), (1 + 0.5 * t) * spec.g_tilde(x[1:]), atol=1e-14)
    # counter-rotating part averages out
    np.testing.assert_allclose(spec.g_tilde(x[1:]), E2, atol=1e-14)


def test_gyroaverage_broadcasts():
    spec = make_scenario("general_perturbed", gradient=0.3)
    t = np.linspace(0, 1, 4)
    x = np.random.default_rng(0).normal(size=(4, 3))
    batch = gyroaverage_E(spec, t, x)
    single = np.array([gyroaverage_E(spec, ti, xi) for ti, xi in zip(t, x)])
    np.testing.assert_allclose(batch, single, atol=1e-15)


@pytest.mark.parametrize("name", LIMIT_SCENARIOS)
def test_limit_scenarios_average_conditions(name):
    spec = make_scenario(name)
    rng = np.random.default_rng(7)
    t = rng.uniform(0, 3, 20)
    x = rng.normal(size=(20, 3))
    assert np.abs(gyroaverage_E(spec, t, x)[:, 0]).max() <= 1e-12
    assert np.abs(gyroaverage_B(spec, t, x)).max() <= 1e-12


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_gyroaverage_node_doubling(name):
    spec = make_scenario(name)
    rng = np.random.default_rng(11)
    t, x = rng.uniform(0, 2, 5), rng.normal(size=(5, 3))
    np.testing.assert_allclose(gyroaverage_E(spec, t, x, n=128), gyroaverage_E(spec, t, x, n=256), atol=1e-12)


def test_general_perturbed_magnetic_average_zero():
    spec = make_scenario("general_perturbed", b_amplitude=0.4)
    assert np.abs(eval_B(spec, 0.0, 0.3, np.zeros(3))).max() > 0.1
    assert np.abs(gyroaverage_B(spec, 0.0, np.zeros(3))).max() < 1e-14


def test_drift_empty_interval():
    for name in SCENARIOS:
        np.testing.assert_array_equal(drift_L(make_scenario(name), 0.7, 0.7, Y), 0.0)


def test_drift_time_independent():
    spec = make_scenario("time_independent", resonant=(0.6, -0.8), counter=0.3, ell=2.0)
    et = gyroaverage_E(spec, 0.0, Y.position())
    for s, t in [(0.0, 1.0), (0.5, 2.0), (1.5, 0.2)]:
        np.testing.assert_allclose(drift_L(spec, s, t, Y), (t - s) * et, atol=1e-13)
        np.testing.assert_allclose(drift_L(spec, s, t, Y, method="quad"), (t - s) * et, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("name", ["separable_linear", "separable_cos", "general_perturbed"])
def test_drift_closed_form_matches_quadrature(name):
    spec = make_scenario(name)
    for s, t in [(0.0, 1.0), (0.3, 2.5)]:
        np.testing.assert_allclose(drift_L(spec, s, t, Y), drift_L(spec, s, t, Y, method="quad"), rtol=1e-10, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 3), st.floats(0, 3), st.floats(0, 3))
def test_drift_additive_and_antisymmetric(s, t, u):
    spec = make_scenario("general_perturbed", gradient=0.2)
    a = drift_L(spec, s, t, Y, method="quad")
    b = drift_L(spec, t, u, Y, method="quad")
    c = drift_L(spec, s, u, Y, method="quad")
    np.testing.assert_allclose(a + b, c, atol=1e-10)
    np.testing.assert_allclose(drift_L(spec, t, s, Y, method="quad"), -a, atol=1e-15)


def test_drift_first_component_zero():
    for name in LIMIT_SCENARIOS:
        assert abs(drift_L(make_scenario(name), 0.0, 1.7, Y, method="quad")[0]) <= 1e-12


def test_drift_primitive_matches_drift_L():
    spec = make_scenario("general_perturbed", gradient=0.5)
    times = np.array([0.9, 0.0, 0.25, 2.0])
    prim = drift_primitive(spec, times, Y)
    for ti, p in zip(times, prim):
        np.testing.assert_allclose(p, drift_L(spec, 0.0, ti, Y, method="quad"), atol=1e-12)
    sep = make_scenario("separable_cos", omega=2.0)
    np.testing.assert_allclose(drift_primitive(sep, times, Y)[:, 1], np.sin(2.0 * times) / 2.0, atol=1e-14)


def _gauss_f0(x, v):
    return np.exp(-np.sum(x * x, axis=-1) - np.sum(v * v, axis=-1))


def test_validate_passes_for_circular_with_gaussian():
    report = validate_assumptions(CircularResonant(1.0), _gauss_f0)
    assert report.passed, report.failures


def test_validate_tau_constant_field_degenerate_pass():
    spec = General(E_fn=lambda t, tau, x: np.broadcast_to(E2, np.broadcast_shapes(np.shape(t), np.shape(tau), np.shape(x)[:-1]) + (3,)))
    report = validate_assumptions(spec)
    assert report["gyroaveraged B vanishes"].passed
    assert report["gyroaveraged E has no parallel part"].passed
    assert report.passed


def test_validate_flags_non_gyrosymmetric_f0():
    def f0(x, v):
        return np.exp(-np.sum(x * x, axis=-1) - v[..., 0] ** 2 - v[..., 1] ** 2)

    report = validate_assumptions(CircularResonant(1.0), f0)
    assert not report.passed
    assert report.failures == ["f0 gyro-symmetric in v"]


def test_validate_flags_parallel_average_and_x1_dependence():
    def e_fn(t, tau, x):
        x = np.asarray(x)
        shape = np.broadcast_shapes(np.shape(t), np.shape(tau), x.shape[:-1])
        out = np.zeros(shape + (3,))
        out[..., 0] = 1.0 + np.broadcast_to(x[..., 0], shape)
        return out

    report = validate_assumptions(General(E_fn=e_fn))
    assert set(report.failures) == {"gyroaveraged E has no parallel part", "gyroaveraged E independent of x1"}


def test_validate_flags_nonzero_magnetic_average():
    spec = General(E_fn=lambda t, tau, x: np.zeros(np.broadcast_shapes(np.shape(t), np.shape(tau), np.shape(x)[:-1]) + (3,)),
                   B_fn=lambda t, tau, x: rotate(E2, -np.broadcast_to(tau, np.broadcast_shapes(np.shape(t), np.shape(tau), np.shape(x)[:-1]))))
    assert validate_assumptions(spec).failures == ["gyroaveraged B vanishes"]
