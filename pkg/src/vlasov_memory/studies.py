"""The six numerical studies behind the command line.

Every study takes a ScenarioConfig and an output directory, writes its CSV
files and summary.json there and returns the Summary. Outputs never contain
timestamps or host data, so reruns are byte-identical.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .config import ConfigError
from .effective import (
    ModeGrid,
    SpectralTrajectory,
    exact_amplitudes,
    exact_trajectory,
    reconstruct_physical,
    relative_mode_errors,
    solve_memory_equation,
    write_reconstruction_csv,
)
from .fields import CircularResonant, Separable, YPoint, gyroaverage_E
from .kernel import (
    KMode,
    default_route,
    kernel_K,
    ktilde_grid,
    ktilde_separable,
    ktilde_time_independent,
    ktilde_volterra_numeric,
    volterra_residual,
)
from .mathcore import E2
from .psi import make_psi, rotating_v2_gauss_xperp
from .scaling import REFERENCE, PhysicalScales, scaling_groups
from .two_scale import GSolution, limit_observable, two_scale_limit_observable, weak_star_f
from .vlasov_sim import (
    EnsembleConfig,
    Snapshot,
    TensorGrid,
    push_arrays,
    resonance_position,
    resonance_reference,
    sample_initial,
    write_snapshots_csv,
)


@dataclass
class Check:
    name: str
    value: object
    tolerance: object
    comparison: str
    passed: bool


def check_le(name, value, tol):
    value = float(value)
    return Check(name, value, float(tol), "<=", bool(value <= tol))


def check_in(name, value, lo, hi):
    value = float(value)
    return Check(name, value, [float(lo), float(hi)], "in", bool(lo <= value <= hi))


def check_true(name, flag, detail=None):
    return Check(name, detail if detail is not None else bool(flag), None, "is true", bool(flag))


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


@dataclass
class Summary:
    study: str
    scenario: str
    seed: int
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        doc = {
            "study": self.study,
            "scenario": self.scenario,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "values": self.values,
        }
        return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"

    def write(self, out_dir):
        Path(out_dir, "summary.json").write_text(self.to_json())


def _fmt(x):
    return repr(float(x))


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _finish(summary, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    summary.write(out)
    return summary


def _order_checks(name, errors, band):
    ratios = [a / b if b > 0 else float("inf") for a, b in zip(errors, errors[1:])]
    return ratios, [check_in(f"{name} ratio {i}", r, *band) for i, r in enumerate(ratios)]


# ---------------------------------------------------------------- kernel-validate

KERNEL_DEFAULTS = {
    "t_values": [0.5, 1.0, 1.5, 2.0],
    "kperp": 1.0,
    "n_list": [128, 256, 512],
    "n_check": 256,
    "error_tol": 5e-4,
    "order_band": [3.5, 4.5],
    "residual_n": 512,
    "residual_tol": 1e-5,
    "n_samples": 50,
    "sample_n": 64,
    "sample_t_max": 2.0,
    "bound_slack": 1e-12,
}


def _closed_form(spec, route, s, t, y, mode):
    if route == "explicit_timeindep":
        return ktilde_time_independent(spec, s, t, y, mode)
    return ktilde_separable(spec, s, t, y, mode)


def _bound_constant(spec, y, t_max):
    """sup|E| |g̃|^2 of the kernel bound, or None without a closed form."""
    xp = np.array([y.x2, y.x3])
    if isinstance(spec, Separable) and spec.primitive is not None:
        ts = np.linspace(0.0, t_max, 4001)
        sup = float(np.abs(spec.scalar_profile(ts, xp)).max())
        g = float(np.linalg.norm(spec.g_tilde(xp)))
        return sup * g * g
    if getattr(spec, "time_independent", False):
        return float(np.linalg.norm(gyroaverage_E(spec, 0.0, y.position())) ** 2)
    return None


def run_kernel_validate(cfg, out):
    """Volterra solver against closed-form kernels, residuals and random kernel checks."""
    p = cfg.study_params(KERNEL_DEFAULTS)
    spec, y = cfg.field, cfg.ypoint
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    mode = KMode(0.0, float(p["kperp"]))
    route = cfg.kernel_route or default_route(spec)
    summary = Summary("kernel-validate", cfg.scenario, cfg.seed)
    values = summary.values
    values["route"] = route
    t_values = [float(t) for t in p["t_values"]]
    if not t_values or min(t_values) <= 0:
        raise ConfigError("t_values must be positive")
    n_list = [int(n) for n in p["n_list"]]

    conv_rows = []
    if route != "volterra_numeric":
        errors = []
        for n in n_list:
            err = 0.0
            for t in t_values:
                g = ktilde_volterra_numeric(spec, t, y, mode, n)
                err = max(err, float(np.abs(g.ktilde - _closed_form(spec, route, g.s_nodes, t, y, mode)).max()))
            errors.append(err)
            conv_rows.append([n, _fmt(err)])
        values["max_error"] = dict(zip(map(str, n_list), errors))
        if int(p["n_check"]) in n_list:
            summary.checks.append(check_le(f"numeric vs closed form at n={p['n_check']}", errors[n_list.index(int(p["n_check"]))], p["error_tol"]))
        ratios, checks = _order_checks("error", errors, p["order_band"])
        values["error_ratios"] = ratios
        summary.checks += checks
        res = 0.0
        for t in t_values:
            res = max(res, volterra_residual(spec, ktilde_grid(spec, t, y, mode, int(p["residual_n"]), route)))
        values["closed_form_residual"] = res
        summary.checks.append(check_le("closed-form residual", res, p["residual_tol"]))
        _write_rows(out / "kernel_convergence.csv", ["n", "max_error"], conv_rows)
        ktilde_grid(spec, max(t_values), y, mode, int(p["n_check"]), route).to_csv(out / "kernel_grid_explicit.csv")
    else:
        residuals = []
        for n in n_list:
            r = max(volterra_residual(spec, ktilde_volterra_numeric(spec, t, y, mode, n)) for t in t_values)
            residuals.append(r)
            conv_rows.append([n, _fmt(r)])
        values["numeric_residual"] = dict(zip(map(str, n_list), residuals))
        ratios, checks = _order_checks("residual", residuals, p["order_band"])
        values["residual_ratios"] = ratios
        summary.checks += checks
        _write_rows(out / "kernel_convergence.csv", ["n", "residual"], conv_rows)
    ktilde_volterra_numeric(spec, max(t_values), y, mode, int(p["n_check"])).to_csv(out / "kernel_grid_numeric.csv")

    # random samples: k1-independence of the numeric solve and the kernel bound
    rng = np.random.default_rng(cfg.seed)
    t_max = float(p["sample_t_max"])
    worst_k1, worst_bound = 0.0, -np.inf
    bound_checked = 0
    for _ in range(int(p["n_samples"])):
        t = rng.uniform(0.05 * t_max, t_max)
        s = rng.uniform(0.0, t)
        k1a, k1b = rng.uniform(-3, 3, 2)
        kp = rng.uniform(0.0, 3.0)
        ys = YPoint(*rng.normal(0.0, 1.0, 3))
        a = ktilde_volterra_numeric(spec, t, ys, KMode(k1a, kp), int(p["sample_n"]))
        b = ktilde_volterra_numeric(spec, t, ys, KMode(k1b, kp, rng.uniform(0, 2 * np.pi)), int(p["sample_n"]))
        worst_k1 = max(worst_k1, float(np.abs(a.ktilde - b.ktilde).max()))
        c = _bound_constant(spec, ys, t_max)
        if c is not None:
            m = KMode(k1a, kp)
            kval = kernel_K(spec, s, t, ys, m, _closed_form(spec, route, s, t, ys, m))
            worst_bound = max(worst_bound, float(abs(kval) - c * (1 + m.norm_sq)))
            bound_checked += 1
    values["k1_independence_max_diff"] = worst_k1
    summary.checks.append(check_le("K̃ independent of k1", worst_k1, 0.0))
    values["bound_samples"] = bound_checked
    if bound_checked:
        values["bound_worst_excess"] = worst_bound
        summary.checks.append(check_le("kernel bound excess", worst_bound, p["bound_slack"]))
    return _finish(summary, out)


# ---------------------------------------------------------------- effective

EFFECTIVE_DEFAULTS = {
    "T": 2.0,
    "dt": 1.0 / 256,
    "dt_order": [1.0 / 64, 1.0 / 128, 1.0 / 256],
    "rel_tol": 1e-4,
    "order_band": [3.5, 4.5],
    "csv_modes": 8,
    "csv_stride": 16,
    "recon_points": 9,
    "recon_box": 4.0,
}


def _sample_modes(cfg, rng):
    g = cfg.mode_grid
    grid = ModeGrid(float(g["k_max"]), int(g["n"]))
    vecs = grid.vectors()
    count = min(int(g["sample_modes"]), len(vecs))
    idx = np.sort(rng.choice(len(vecs), size=count, replace=False))
    return grid, [KMode.from_vector(vecs[i]) for i in idx]


def run_effective(cfg, out):
    """Memory-equation solver against the exact Fourier solution on sampled modes."""
    p = cfg.study_params(EFFECTIVE_DEFAULTS)
    spec, data, y = cfg.field, cfg.data, cfg.ypoint
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    grid, modes = _sample_modes(cfg, rng)
    T, dt = float(p["T"]), float(p["dt"])
    summary = Summary("effective", cfg.scenario, cfg.seed)
    values = summary.values
    route = cfg.kernel_route or default_route(spec)
    values["route"] = route
    values["modes"] = len(modes)
    try:
        num = solve_memory_equation(spec, data, modes, T, dt, y, route)
        ex = exact_trajectory(spec, data, modes, T, dt, y)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    err = relative_mode_errors(num, ex)
    values["max_relative_error"] = float(err.max())
    summary.checks.append(check_le("per-mode relative error", err.max(), p["rel_tol"]))

    order_errors = []
    for h in p["dt_order"]:
        order_errors.append(float(relative_mode_errors(
            solve_memory_equation(spec, data, modes, T, h, y, route), exact_trajectory(spec, data, modes, T, h, y)).max()))
    values["order_errors"] = order_errors
    ratios, checks = _order_checks("dt halving", order_errors, p["order_band"])
    values["order_ratios"] = ratios
    values["observed_order"] = [math.log2(r) if r > 0 and math.isfinite(r) else None for r in ratios]
    summary.checks += checks

    picks = list(range(min(int(p["csv_modes"]), len(modes))))
    num.to_csv(out / "trajectory_memory.csv", int(p["csv_stride"]), picks)
    ex.to_csv(out / "trajectory_exact.csv", int(p["csv_stride"]), picks)

    # physical-space dump at T from the whole mode grid, exact amplitudes
    all_modes = grid.modes()
    kvecs = grid.vectors()
    full = SpectralTrajectory(np.array([T]), all_modes, y, exact_amplitudes(spec, data, [T], kvecs, y), "exact", kvecs)
    a = np.linspace(-float(p["recon_box"]), float(p["recon_box"]), int(p["recon_points"]))
    z = np.stack(np.meshgrid(a, a, a, indexing="ij"), axis=-1).reshape(-1, 3)
    vals, residue = reconstruct_physical(full, z)
    values["reconstruction_imag_residue"] = float(residue)
    write_reconstruction_csv(out / "reconstruction.csv", T, z, y, vals)
    return _finish(summary, out)


# ---------------------------------------------------------------- twoscale

TWOSCALE_DEFAULTS = {
    "times": [0.5, 1.0, 2.0],
    "n_points": 125,
    "tol": 1e-5,
    "x_box": 2.0,
    "v_box": 2.0,
    "n_tau": 64,
}


def run_twoscale(cfg, out):
    """Fourier reconstruction against the weak-* limit at random phase-space points."""
    p = cfg.study_params(TWOSCALE_DEFAULTS)
    spec, data = cfg.field, cfg.data
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    gs = GSolution(spec, data)
    if not gs.report.passed:
        raise ConfigError(f"scenario violates the limit assumptions: {[c.name for c in gs.report.failures]}")
    rng = np.random.default_rng(cfg.seed)
    n = int(p["n_points"])
    x = rng.uniform(-p["x_box"], p["x_box"], (n, 3))
    v = rng.uniform(-p["v_box"], p["v_box"], (n, 3))
    g = cfg.mode_grid
    grid = ModeGrid(float(g["k_max"]), int(g["n"]))
    kvecs = grid.vectors()
    modes = grid.modes()
    times = np.array([float(t) for t in p["times"]])
    spectral = np.empty((len(times), n))
    for i in range(n):
        y = YPoint(v[i, 0], x[i, 1], x[i, 2])
        traj = SpectralTrajectory(times, modes, y, exact_amplitudes(spec, data, times, kvecs, y), "exact", kvecs)
        z = np.array([[x[i, 0], v[i, 1], v[i, 2]]])
        for j in range(len(times)):
            spectral[j, i] = reconstruct_physical(traj, z, index=j)[0][0]
    summary = Summary("twoscale", cfg.scenario, cfg.seed)
    gaps = {}
    rows_limit, rows_spec = [], []
    for j, t in enumerate(times):
        f = weak_star_f(gs, t, x, v, int(p["n_tau"]))
        gap = float(np.abs(f - spectral[j]).max())
        gaps[repr(float(t))] = gap
        summary.checks.append(check_le(f"spectral vs limit at t={t}", gap, p["tol"]))
        rows_limit += _cloud_rows(t, x, v, f)
        rows_spec += _cloud_rows(t, x, v, spectral[j])
    summary.values["max_discrepancy"] = gaps
    summary.values["modes"] = len(modes)
    _write_rows(out / "points_limit.csv", CLOUD_HEADER, rows_limit)
    _write_rows(out / "points_spectral.csv", CLOUD_HEADER, rows_spec)
    return _finish(summary, out)


CLOUD_HEADER = ["t", "x1", "x2", "x3", "v1", "v2", "v3", "f"]


def _cloud_rows(t, x, v, f):
    return [[_fmt(t)] + [_fmt(c) for c in xi] + [_fmt(c) for c in vi] + [_fmt(fi)] for xi, vi, fi in zip(x, v, f)]


# ---------------------------------------------------------------- epsilon-sweep

SWEEP_DEFAULTS = {
    "t": 1.0,
    "dims": [1, 20, 20, 1, 20, 20],
    "psi": "gauss_xperp",
    "psi_params": {"b": 1.0},
    "n_tau": 64,
    "series_points": 8,
    "two_scale": True,
    "two_scale_nodes": 33,
    "two_scale_b": 1.0,
    "moment_rtol": 1e-6,
    "zero_gap_tol": 1e-10,
    "snapshot_stride": 400,
}


def run_epsilon_sweep(cfg, out):
    """Particle observables against the limit observable for decreasing eps."""
    p = cfg.study_params(SWEEP_DEFAULTS)
    spec, data = cfg.field, cfg.data
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        psi = make_psi(p["psi"], **p["psi_params"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    gs = GSolution(spec, data)
    if not gs.report.passed:
        raise ConfigError(f"scenario violates the limit assumptions: {[c.name for c in gs.report.failures]}")
    T = float(p["t"])
    nser = int(p["series_points"])
    if T <= 0 or nser < 1:
        raise ConfigError("t and series_points must be positive")
    sampling = TensorGrid(tuple(int(d) for d in p["dims"]))
    pts, w, f0v = sample_initial(data, sampling)
    wf = w * f0v
    summary = Summary("epsilon-sweep", cfg.scenario, cfg.seed)
    values = summary.values
    values["particles"] = len(w)
    values["psi"] = psi.name

    initial = float(np.sum(wf * psi(pts[:, :3], pts[:, 3:])))
    moment = float(psi.moment(data))
    values["initial_observable"] = initial
    values["initial_moment"] = moment
    summary.checks.append(check_le("t=0 observable vs closed-form moment", abs(initial - moment) / abs(moment), p["moment_rtol"]))

    series_t = [T * (i + 1) / nser for i in range(nser)]
    limit_series = [limit_observable(gs, t, psi, sampling, int(p["n_tau"])) for t in series_t]
    limit_T = limit_series[-1]
    values["limit_observable"] = limit_T

    psi2 = rotating_v2_gauss_xperp(float(p["two_scale_b"]))
    if p["two_scale"]:
        nodes = np.linspace(0.0, T, int(p["two_scale_nodes"]))
        # psi2 pulled back along the rotation is gyro-independent, so few tau nodes are exact
        values["two_scale_limit"] = two_scale_limit_observable(gs, nodes, psi2, sampling, n_tau=16)

    series_rows = [[_fmt(0.0), "limit", _fmt(initial)]]
    series_rows += [[_fmt(t), "limit", _fmt(v)] for t, v in zip(series_t, limit_series)]
    gaps, gaps2, sweep_rows = [], [], []
    last_snap = None
    for eps in cfg.eps_list:
        ecfg = EnsembleConfig(eps, T, eps / cfg.dt_fraction, sampling)
        nsteps, h = ecfg.steps(), ecfg.step_size()
        x = np.ascontiguousarray(pts[:, :3])
        v = np.ascontiguousarray(pts[:, 3:])
        marks = {int(round(t / h)): t for t in series_t}
        if any(abs(n * h - t) > 1e-9 for n, t in marks.items()):
            raise ConfigError(f"series times are not on the step grid of eps={eps}")
        obs = {}
        integrand = [float(np.sum(wf * psi2(0.0, 0.0, x, v)))]

        def record(n, t):
            if n in marks:
                obs[n] = float(np.sum(wf * psi(x, v)))
            if p["two_scale"]:
                integrand.append(float(np.sum(wf * psi2(t, np.mod(t / eps, 2 * np.pi), x, v))))

        push_arrays(x, v, 0.0, nsteps, h, ecfg, spec, record)
        obs_T = obs[nsteps]
        gap = abs(obs_T - limit_T)
        gaps.append(gap)
        row = {"eps": eps, "steps": nsteps, "observable": obs_T, "gap": gap}
        if p["two_scale"]:
            vals = np.array(integrand)
            ts_eps = float(np.sum(0.5 * h * (vals[1:] + vals[:-1])))
            gaps2.append(abs(ts_eps - values["two_scale_limit"]))
            row["two_scale_observable"] = ts_eps
            row["two_scale_gap"] = gaps2[-1]
        sweep_rows.append(row)
        series_rows.append([_fmt(0.0), repr(eps), _fmt(initial)])
        series_rows += [[_fmt(marks[n]), repr(eps), _fmt(obs[n])] for n in sorted(marks)]
        last_snap = (eps, Snapshot(T, x, v, w, f0v))

    values["gaps"] = gaps
    values["eps"] = cfg.eps_list
    if p["two_scale"]:
        values["two_scale_gaps"] = gaps2
    rates = [math.log(a / b) / math.log(e0 / e1) if a > 0 and b > 0 else None
             for a, b, e0, e1 in zip(gaps, gaps[1:], cfg.eps_list, cfg.eps_list[1:])]
    values["empirical_rates"] = rates
    values["sweep"] = sweep_rows

    if getattr(spec, "name", "") == "zero" or p["psi"] == "one":
        summary.checks.append(check_le("gaps vanish", max(gaps), p["zero_gap_tol"] * max(1.0, abs(limit_T))))
    else:
        decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
        summary.checks.append(check_true("gaps strictly decreasing", decreasing, gaps))

    _write_rows(out / "observable_series.csv", ["t", "eps", "observable"], series_rows)
    header = ["eps", "steps", "observable", "limit", "gap"] + (["two_scale_observable", "two_scale_limit", "two_scale_gap"] if p["two_scale"] else [])
    rows = []
    for r in sweep_rows:
        line = [repr(r["eps"]), r["steps"], _fmt(r["observable"]), _fmt(limit_T), _fmt(r["gap"])]
        if p["two_scale"]:
            line += [_fmt(r["two_scale_observable"]), _fmt(values["two_scale_limit"]), _fmt(r["two_scale_gap"])]
        rows.append(line)
    _write_rows(out / "sweep.csv", header, rows)
    write_snapshots_csv(out / "snapshots.csv", [last_snap[1]], int(p["snapshot_stride"]))
    values["snapshot_eps"] = last_snap[0]
    return _finish(summary, out)


# ---------------------------------------------------------------- resonance

RESONANCE_DEFAULTS = {
    "eps": 1e-2,
    "T": 2.0,
    "v0": [0.0, 0.3, -0.7],
    "x0": [0.0, 0.0, 0.0],
    "velocity_tol": 1e-4,
    "slope_tol": 1e-3,
    "order_fractions": [8, 16, 32],
    "order_band": [3.5, 4.5],
    "csv_stride": 8,
}


def _resonant_run(spec, x0, v0, eps, T, fraction, record=None):
    cfg = EnsembleConfig(eps, T, eps / fraction, TensorGrid())
    x = np.array(x0, dtype=float).reshape(1, 3)
    v = np.array(v0, dtype=float).reshape(1, 3)
    push_arrays(x, v, 0.0, cfg.steps(), cfg.step_size(), cfg, spec, record and (lambda n, t: record(t, x[0], v[0])))
    return x[0], v[0], cfg.step_size()


def run_resonance(cfg, out):
    """Single resonant particle: velocity, heating rate and position order."""
    p = cfg.study_params(RESONANCE_DEFAULTS)
    spec = cfg.field
    if not (isinstance(spec, CircularResonant) and spec.amplitude == 1.0):
        raise ConfigError("the resonance study needs scenario circular_resonant with amplitude 1")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    eps, T = float(p["eps"]), float(p["T"])
    v0 = np.array(p["v0"], dtype=float)
    x0 = np.array(p["x0"], dtype=float)
    if v0.shape != (3,) or x0.shape != (3,) or v0[0] != 0.0:
        raise ConfigError("v0 and x0 need three entries and v0 must be perpendicular to e1")
    summary = Summary("resonance", cfg.scenario, cfg.seed)
    values = summary.values

    ts, vs = [0.0], [v0.copy()]
    _resonant_run(spec, x0, v0, eps, T, cfg.dt_fraction, lambda t, x, v: (ts.append(t), vs.append(v.copy())))
    ts, vs = np.array(ts), np.array(vs)
    ref = np.array([resonance_reference(v0, t, eps)[0] for t in ts])
    verr = float(np.abs(vs - ref).max())
    values["velocity_error"] = verr
    summary.checks.append(check_le("velocity vs exact resonant motion", verr, p["velocity_tol"]))

    speed2 = np.sum(vs * vs, axis=1)
    rate_exact = 2.0 * (v0 @ E2 + ts)
    fit = np.polynomial.Polynomial.fit(ts, speed2, 2).convert()
    rate_fit = fit.deriv()(ts)
    slope_err = float(np.abs(rate_fit - rate_exact).max())
    values["fit_coefficients"] = list(fit.coef)
    values["slope_error"] = slope_err
    summary.checks.append(check_le("fitted d|V|^2/dt vs 2(v0.e2 + t)", slope_err, p["slope_tol"]))

    perr = []
    for frac in p["order_fractions"]:
        xe, _, _ = _resonant_run(spec, x0, v0, eps, T, float(frac))
        perr.append(float(np.abs(xe - resonance_position(x0, v0, T, eps)).max()))
    values["position_errors"] = perr
    ratios, checks = _order_checks("position dt halving", perr, p["order_band"])
    values["position_ratios"] = ratios
    summary.checks += checks

    stride = int(p["csv_stride"])
    rows = []
    for i in range(0, len(ts), stride):
        rows.append([_fmt(ts[i])] + [_fmt(c) for c in vs[i]] + [_fmt(c) for c in ref[i]]
                    + [_fmt(speed2[i]), _fmt(rate_exact[i]), _fmt(rate_fit[i])])
    _write_rows(out / "resonance.csv",
                ["t", "v1", "v2", "v3", "v1_exact", "v2_exact", "v3_exact", "speed2", "rate_exact", "rate_fit"], rows)
    return _finish(summary, out)


# ---------------------------------------------------------------- scaling

SCALING_DEFAULTS = {
    **{k: v for k, v in asdict(REFERENCE).items()},
    "expected_ratio_length": 1e-3,
    "ratio_length_factor": 2.0,
    "expected_ratio_time": 1e3,
    "expected_ratio_force": 1e-3,
    "exact_rtol": 1e-12,
    "consistency_tol": 0.5,
}


def run_scaling(cfg, out):
    """Dimensionless groups of the strong-field scaling from physical magnitudes."""
    p = cfg.study_params(SCALING_DEFAULTS)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        scales = PhysicalScales(**{k: float(p[k]) for k in asdict(REFERENCE)})
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    g = scaling_groups(scales, float(p["consistency_tol"]))
    summary = Summary("scaling", cfg.scenario, cfg.seed)
    summary.values.update(g)
    summary.values["inputs"] = asdict(scales)
    f = float(p["ratio_length_factor"])
    target = float(p["expected_ratio_length"])
    summary.checks.append(check_in("ratio_length within factor of expected", g["ratio_length"], target / f, target * f))
    for key in ("ratio_time", "ratio_force"):
        want = float(p[f"expected_{key}"])
        summary.checks.append(check_le(f"{key} relative deviation", abs(g[key] - want) / want, p["exact_rtol"]))
    rows = [[k, _fmt(g[k])] for k in ("omega_c", "a_L", "ratio_length", "ratio_time", "ratio_force")]
    rows.append(["consistent", str(g["consistent"]).lower()])
    _write_rows(out / "scaling.csv", ["quantity", "value"], rows)
    return _finish(summary, out)


STUDIES = {
    "kernel-validate": run_kernel_validate,
    "effective": run_effective,
    "twoscale": run_twoscale,
    "epsilon-sweep": run_epsilon_sweep,
    "resonance": run_resonance,
    "scaling": run_scaling,
}
