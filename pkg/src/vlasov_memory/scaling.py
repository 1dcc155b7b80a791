"""Dimensionless groups of the strong-field scaling."""

from dataclasses import asdict, dataclass

ELEMENTARY_CHARGE = 1.602176634e-19


@dataclass(frozen=True)
class PhysicalScales:
    """Characteristic magnitudes in SI units."""

    B: float  # tesla
    m: float  # kg
    q: float  # coulomb
    t: float  # s
    L: float  # m
    v: float  # m/s
    E: float  # V/m

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")


# q/m chosen so that q B / m = 1e5 rad/s at B = 1 T, the order of magnitude
# quoted for potassium ions
REFERENCE = PhysicalScales(B=1.0, m=ELEMENTARY_CHARGE / 1e5, q=ELEMENTARY_CHARGE, t=1e-2, L=1.0, v=1e3, E=1.0)


def scaling_groups(s, rel_tol=0.5):
    """Cyclotron pulsation, Larmor radius and the three ratios.

    ``consistent`` is True when ratio_length, 1/ratio_time and ratio_force
    agree within a factor ``1 + rel_tol`` of each other, i.e. a single eps
    describes the regime.
    """
    omega_c = s.q * s.B / s.m
    a_l = s.v / omega_c
    groups = {
        "omega_c": omega_c,
        "a_L": a_l,
        "ratio_length": a_l / s.L,
        "ratio_time": omega_c * s.t,
        "ratio_force": s.E / (s.v * s.B),
    }
    eps_values = [groups["ratio_length"], 1.0 / groups["ratio_time"], groups["ratio_force"]]
    groups["consistent"] = bool(max(eps_values) / min(eps_values) <= 1.0 + rel_tol)
    return groups
