"""Run configuration: one JSON document per study.

Top-level keys (all optional):

    scenario       registered field scenario name (default circular_resonant)
    field_params   keyword parameters of the scenario factory
    initial_data   GaussianProduct parameters
    eps_list       strictly decreasing list of eps values
    dt_fraction    particle step is eps / dt_fraction (>= 8)
    kernel_route   explicit_timeindep | explicit_separable | volterra_numeric
    mode_grid      {"k_max", "n", "sample_modes"}
    y              [v1, x2, x3] parameter point of the effective equation
    seed           integer seed for every random choice
    study          study-specific parameters, merged over the study defaults
"""

import json
from dataclasses import dataclass, field

from .effective import GaussianProduct
from .fields import SCENARIOS, ConfigurationError, YPoint, make_scenario
from .kernel import ROUTES

TOP_LEVEL = {"scenario", "field_params", "initial_data", "eps_list", "dt_fraction", "kernel_route",
             "mode_grid", "y", "seed", "study"}


class ConfigError(ValueError):
    """Invalid configuration; the CLI exits with status 2."""


@dataclass
class ScenarioConfig:
    scenario: str
    field_params: dict = field(default_factory=dict)
    initial_data: dict = field(default_factory=dict)
    eps_list: list = field(default_factory=lambda: [0.1, 0.05, 0.025, 0.0125])
    dt_fraction: float = 16.0
    kernel_route: str | None = None
    mode_grid: dict = field(default_factory=lambda: {"k_max": 4.0, "n": 32, "sample_modes": 128})
    y: list = field(default_factory=lambda: [0.3, 0.2, -0.1])
    seed: int = 0
    study: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; known: {sorted(SCENARIOS)}")
        try:
            self.field = make_scenario(self.scenario, **self.field_params)
        except ConfigurationError as exc:
            raise ConfigError(str(exc)) from None
        try:
            params = dict(self.initial_data)
            if "center_x" in params:
                params["center_x"] = tuple(float(c) for c in params["center_x"])
            self.data = GaussianProduct(**params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad initial_data: {exc}") from None
        eps = [float(e) for e in self.eps_list]
        if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError(f"eps_list must be positive and strictly decreasing, got {self.eps_list}")
        self.eps_list = eps
        if not float(self.dt_fraction) >= 8:
            raise ConfigError(f"dt_fraction must be >= 8 (dt <= eps/8), got {self.dt_fraction}")
        if self.kernel_route is not None and self.kernel_route not in ROUTES:
            raise ConfigError(f"unknown kernel_route {self.kernel_route!r}; known: {list(ROUTES)}")
        grid = {"k_max": 4.0, "n": 32, "sample_modes": 128, **self.mode_grid}
        if grid["k_max"] <= 0 or int(grid["n"]) < 2 or int(grid["sample_modes"]) < 1:
            raise ConfigError(f"bad mode_grid {self.mode_grid}")
        self.mode_grid = grid
        if len(self.y) != 3:
            raise ConfigError(f"y must have three entries, got {self.y}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def ypoint(self):
        return YPoint(*(float(c) for c in self.y))

    def study_params(self, defaults):
        unknown = set(self.study) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown study parameters {sorted(unknown)}; known: {sorted(defaults)}")
        return {**defaults, **self.study}


def parse_config(doc, seed=None):
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(doc) - TOP_LEVEL
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    doc = dict(doc)
    doc.setdefault("scenario", "circular_resonant")
    if seed is not None:
        doc["seed"] = seed
    try:
        return ScenarioConfig(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, seed=None):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    return parse_config(doc, seed)
