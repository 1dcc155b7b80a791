import json
import subprocess
import sys

import numpy as np
import pytest

from vlasov_memory.cli import default_config_path, main
from vlasov_memory.config import ConfigError, load_config, parse_config
from vlasov_memory.effective import GaussianProduct
from vlasov_memory.psi import BUILTIN, make_psi
from vlasov_memory.scaling import ELEMENTARY_CHARGE, REFERENCE, PhysicalScales, scaling_groups
from vlasov_memory.studies import STUDIES, Summary, check_in, check_le
from vlasov_memory.vlasov_sim import TensorGrid, sample_initial

SMALL = {
    "kernel-validate": {"study": {"n_list": [32, 64], "n_check": 64, "error_tol": 1e-2, "n_samples": 5, "sample_n": 16,
                                 "residual_n": 64, "order_band": [3.0, 5.0]}},
    "effective": {"mode_grid": {"k_max": 2.0, "n": 8, "sample_modes": 16},
                  "study": {"T": 0.5, "dt": 1 / 64, "dt_order": [1 / 16, 1 / 32, 1 / 64], "recon_points": 3,
                            "order_band": [3.0, 5.0]}},
    "twoscale": {"mode_grid": {"k_max": 4.0, "n": 32}, "study": {"n_points": 6, "times": [0.5, 1.0]}},
    "epsilon-sweep": {"eps_list": [0.1, 0.05], "study": {"t": 0.25, "dims": [2, 4, 4, 2, 4, 4], "series_points": 2,
                                                          "two_scale_nodes": 5}},
    "resonance": {"study": {"T": 0.5}},
    "scaling": {},
}


def _cfg(study, **extra):
    doc = json.loads(default_config_path(study).read_text())
    for key, value in SMALL[study].items():
        doc[key] = {**doc.get(key, {}), **value} if isinstance(value, dict) else value
    doc.update(extra)
    return doc


def _write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


# ---------------------------------------------------------------- config


def test_bundled_configs_parse():
    for study in STUDIES:
        cfg = load_config(default_config_path(study))
        assert cfg.seed == 0


@pytest.mark.parametrize("doc", [
    {"scenario": "no_such_field"},
    {"scenario": "circular_resonant", "bogus": 1},
    {"eps_list": [0.05, 0.1]},
    {"eps_list": [0.1, -0.05]},
    {"dt_fraction": 4},
    {"kernel_route": "magic"},
    {"mode_grid": {"n": 1}},
    {"y": [0.0, 1.0]},
    {"seed": -1},
    {"seed": 2 ** 64},
    {"field_params": {"amplitude": 1.0, "colour": "red"}},
    {"initial_data": {"width_x": -1.0}},
    [1, 2, 3],
])
def test_invalid_configs_raise(doc):
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_seed_override_and_defaults():
    cfg = parse_config({}, seed=17)
    assert cfg.scenario == "circular_resonant" and cfg.seed == 17
    assert cfg.eps_list == [0.1, 0.05, 0.025, 0.0125]


def test_study_params_reject_unknown_keys():
    cfg = parse_config({"study": {"nonsense": 1}})
    with pytest.raises(ConfigError):
        cfg.study_params({"T": 1.0})
    assert parse_config({"study": {"T": 3.0}}).study_params({"T": 1.0, "n": 2}) == {"T": 3.0, "n": 2}


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


# ---------------------------------------------------------------- exit codes


def test_exit_code_invalid_config(tmp_path):
    path = _write(tmp_path, {"scenario": "no_such_field"})
    assert main(["twoscale", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert main(["effective", "--config", str(tmp_path / "absent.json"), "--out", str(tmp_path / "o")]) == 2
    assert main(["resonance", "--config", str(_write(tmp_path, {"study": {"warp": 9}})), "--out", str(tmp_path)]) == 2


def test_exit_code_bad_arguments(tmp_path, capsys):
    assert main(["no-such-study", "--out", str(tmp_path)]) == 2
    assert main(["scaling"]) == 2
    assert main(["scaling", "--out", str(tmp_path), "--seed", "-3"]) == 2
    assert main(["scaling", "--out", str(tmp_path), "--seed", "12x"]) == 2


def test_exit_code_resonance_wrong_scenario(tmp_path):
    path = _write(tmp_path, {"scenario": "separable_cos"})
    assert main(["resonance", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_exit_codes_ok_and_failed(tmp_path):
    assert main(["resonance", "--config", str(_write(tmp_path, _cfg("resonance"))), "--out", str(tmp_path / "r")]) == 0
    doc = json.loads((tmp_path / "r" / "summary.json").read_text())
    assert doc["passed"] is True and doc["study"] == "resonance"
    # bundled scaling inputs miss the expected length ratio (see README)
    assert main(["scaling", "--out", str(tmp_path / "s")]) == 1
    ok = _write(tmp_path, {"study": {"expected_ratio_length": 1e-2}}, "scale_ok.json")
    assert main(["scaling", "--config", str(ok), "--out", str(tmp_path / "s2")]) == 0


def test_module_entry_point(tmp_path):
    cfg = _write(tmp_path, {"scenario": "nope"})
    proc = subprocess.run([sys.executable, "-m", "vlasov_memory", "scaling", "--config", str(cfg), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "unknown scenario" in proc.stderr


# ---------------------------------------------------------------- summaries and determinism


def test_summary_json_is_stable_and_clean(tmp_path):
    s = Summary("x", "zero", 3, [check_le("a", np.float64(0.5), 1.0), check_in("b", 2.0, 1.0, 3.0)],
                {"arr": np.arange(3), "nan": float("nan"), "flag": np.bool_(True)})
    doc = json.loads(s.to_json())
    assert doc["passed"] is True
    assert doc["values"] == {"arr": [0, 1, 2], "nan": "nan", "flag": True}
    assert [c["comparison"] for c in doc["checks"]] == ["<=", "in"]
    s.checks.append(check_le("c", 2.0, 1.0))
    assert not s.passed


@pytest.mark.parametrize("study", list(STUDIES))
def test_reruns_are_byte_identical(study, tmp_path):
    cfg = _write(tmp_path, _cfg(study))
    outs = [tmp_path / "a", tmp_path / "b"]
    codes = [main([study, "--config", str(cfg), "--out", str(o), "--seed", "11"]) for o in outs]
    assert codes[0] == codes[1]
    files = sorted(p.name for p in outs[0].iterdir())
    assert "summary.json" in files and any(f.endswith(".csv") for f in files)
    assert files == sorted(p.name for p in outs[1].iterdir())
    for name in files:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    doc = json.loads((outs[0] / "summary.json").read_text())
    assert set(doc) == {"study", "scenario", "seed", "passed", "checks", "values"}
    assert doc["seed"] == 11
    for c in doc["checks"]:
        assert set(c) == {"name", "value", "tolerance", "comparison", "passed"}


def test_seed_changes_sampled_output(tmp_path):
    cfg = _write(tmp_path, _cfg("twoscale"))
    main(["twoscale", "--config", str(cfg), "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["twoscale", "--config", str(cfg), "--out", str(tmp_path / "b"), "--seed", "2"])
    a = (tmp_path / "a" / "points_limit.csv").read_text()
    assert a != (tmp_path / "b" / "points_limit.csv").read_text()
    assert a.splitlines()[0] == "t,x1,x2,x3,v1,v2,v3,f"


def test_study_csv_headers(tmp_path):
    STUDIES["kernel-validate"](parse_config(_cfg("kernel-validate")), tmp_path / "k")
    head = (tmp_path / "k" / "kernel_grid_numeric.csv").read_text().splitlines()[0]
    assert head == "s,t,y1,y2,y3,k1,kperp,re(K),im(K),provenance"
    STUDIES["effective"](parse_config(_cfg("effective")), tmp_path / "e")
    head = (tmp_path / "e" / "trajectory_memory.csv").read_text().splitlines()[0]
    assert head == "t,k1,kperp,y1,y2,y3,re,im,route"
    STUDIES["epsilon-sweep"](parse_config(_cfg("epsilon-sweep")), tmp_path / "s")
    head = (tmp_path / "s" / "snapshots.csv").read_text().splitlines()[0]
    assert head == "t,x1,x2,x3,v1,v2,v3,w,f0_value"


def test_kernel_validate_general_field_uses_residuals(tmp_path):
    doc = _cfg("kernel-validate", scenario="general_perturbed", field_params={"gradient": 0.3})
    s = STUDIES["kernel-validate"](parse_config(doc), tmp_path)
    assert s.values["route"] == "volterra_numeric"
    assert "numeric_residual" in s.values and "bound_samples" in s.values
    assert s.values["bound_samples"] == 0
    assert s.passed


# ---------------------------------------------------------------- epsilon sweep trivial cases


def test_sweep_zero_field_gaps_vanish(tmp_path):
    doc = _cfg("epsilon-sweep", scenario="zero", field_params={})
    doc["study"].update({"psi": "gauss_parallel", "psi_params": {"b": 4.0, "beta": 4.0}, "dims": [10, 2, 2, 10, 10, 10]})
    s = STUDIES["epsilon-sweep"](parse_config(doc), tmp_path)
    assert max(s.values["gaps"]) <= 1e-12 * s.values["limit_observable"]
    assert s.passed


def test_sweep_constant_psi_gaps_vanish(tmp_path):
    doc = _cfg("epsilon-sweep")
    doc["study"].update({"psi": "one", "psi_params": {}})
    s = STUDIES["epsilon-sweep"](parse_config(doc), tmp_path)
    assert max(s.values["gaps"]) <= 1e-12 * s.values["limit_observable"]
    assert s.passed


def test_sweep_rejects_unknown_psi(tmp_path):
    doc = _cfg("epsilon-sweep")
    doc["study"]["psi"] = "wobble"
    assert main(["epsilon-sweep", "--config", str(_write(tmp_path, doc)), "--out", str(tmp_path / "o")]) == 2


# ---------------------------------------------------------------- psi and scaling


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_psi_moments_match_quadrature(name):
    data = GaussianProduct(center_x=(0.3, -0.4, 0.2), width_x=0.35, width_vpar=0.3, width_vperp=0.4, amplitude=1.3)
    psi = make_psi(name)
    pts, w, f0v = sample_initial(data, TensorGrid((12, 12, 12, 12, 12, 12)))
    got = np.sum(w * f0v * psi(pts[:, :3], pts[:, 3:]))
    assert got == pytest.approx(psi.moment(data), rel=1e-9)


def test_make_psi_unknown():
    with pytest.raises(ValueError):
        make_psi("nope")


def test_scaling_unity_and_doubling():
    unit = scaling_groups(PhysicalScales(1, 1, 1, 1, 1, 1, 1))
    assert unit == {"omega_c": 1.0, "a_L": 1.0, "ratio_length": 1.0, "ratio_time": 1.0, "ratio_force": 1.0,
                    "consistent": True}
    base = PhysicalScales(B=0.5, m=2e-26, q=ELEMENTARY_CHARGE, t=1e-3, L=0.1, v=2e3, E=3.0)
    doubled = PhysicalScales(B=1.0, m=2e-26, q=ELEMENTARY_CHARGE, t=1e-3, L=0.1, v=2e3, E=3.0)
    g0, g1 = scaling_groups(base), scaling_groups(doubled)
    assert g1["a_L"] == pytest.approx(g0["a_L"] / 2, rel=1e-15)
    assert g1["ratio_time"] == pytest.approx(2 * g0["ratio_time"], rel=1e-15)
    assert g1["ratio_force"] == pytest.approx(g0["ratio_force"] / 2, rel=1e-15)


def test_scaling_reference_values():
    g = scaling_groups(REFERENCE)
    assert g["omega_c"] == pytest.approx(1e5, rel=1e-15)
    assert g["ratio_time"] == pytest.approx(1e3, rel=1e-12)
    assert g["ratio_force"] == pytest.approx(1e-3, rel=1e-12)
    # v/omega_c/L for these inputs is 1e-2, an order off the other two groups
    assert g["ratio_length"] == pytest.approx(1e-2, rel=1e-12)
    assert g["consistent"] is False


def test_scaling_rejects_nonpositive():
    with pytest.raises(ValueError):
        PhysicalScales(B=0.0, m=1, q=1, t=1, L=1, v=1, E=1)
