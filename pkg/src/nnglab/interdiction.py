"""No-signaling scan for the probe-deflection thought experiment.

A lump of mass M in a two-place CM superposition could, in a mean-field
gravity picture, signal faster than light: a distant measurement picks a
branch, and a probe mass grazing the lump for a time T reads the choice
off its deflection. Reading a deflection at all requires

    G M T / R^2  >=  hbar / (m Z)                (resolvable kick)

with R the lump radius, m the probe mass, Z the superposition separation,
and T ~ R / v_x the grazing time. Eliminating v_x at the marginal kick
turns this into a lower bound on the measurement time,

    T  >=  (hbar / m)^(1/3) * [ (1/2) (4 pi rho / 3)^(2/3) G M^(1/3) ]^(-2/3),

while the intrinsic reduction dynamics destroys the superposition after
tau_g = hbar / (G M^(5/3) rho^(1/3)), so any successful protocol also needs
T well below tau_g. The scan tabulates both bounds across a mass range and
flags masses where the window [t_min, tau_g / margin] is non-empty. It
never is: t_min / tau_g grows monotonically with M and already exceeds
the margin at the smallest self-localizing masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import CONSTANTS, MASS_THRESHOLD_PROTONS, PhysConstants, sphere_radius, tau_g

__all__ = [
    "EPRScenario",
    "FeasibilityCurve",
    "deflection_bound",
    "t_min",
    "interdiction_scan",
    "default_mass_grid",
]


@dataclass(frozen=True)
class EPRScenario:
    """One lump + probe configuration.

    Z defaults to the lump radius (superposition displaced by its own size);
    v_x is optional and only needed for the raw deflection check. margin is
    the numeric stand-in for 'much less than'.
    """

    mass: float                    # lump mass M, kg
    density: float                 # lump density rho, kg/m^3
    probe_mass: float              # probe mass m, kg
    separation: float | None = None   # Z, m
    probe_speed: float | None = None  # v_x, m/s
    margin: float = 10.0

    def __post_init__(self) -> None:
        for name in ("mass", "density", "probe_mass"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.probe_mass >= self.mass:
            raise ValueError("probe mass must be much smaller than the lump mass")
        if self.margin < 1.0:
            raise ValueError("margin must be >= 1")

    @property
    def radius(self) -> float:
        return sphere_radius(self.mass, self.density)

    @property
    def z_separation(self) -> float:
        return self.radius if self.separation is None else self.separation


def deflection_bound(scenario: EPRScenario, constants: PhysConstants = CONSTANTS) -> bool:
    """True iff the probe kick G M T / R^2 resolves the separation Z.

    T is the grazing time R / v_x; the comparison is inclusive.
    """
    if scenario.probe_speed is None:
        raise ValueError("probe_speed is required for the deflection check")
    if scenario.probe_speed <= 0.0:
        raise ValueError("probe_speed must be positive")
    r = scenario.radius
    grazing_time = r / scenario.probe_speed
    kick = constants.G * scenario.mass * grazing_time / r**2
    floor = constants.hbar / (scenario.probe_mass * scenario.z_separation)
    return kick >= floor


def t_min(
    mass_kg: float,
    density_kg_m3: float,
    probe_mass_kg: float,
    constants: PhysConstants = CONSTANTS,
):
    """Shortest measurement time able to resolve the deflection, seconds."""
    for name, value in (("mass", mass_kg), ("density", density_kg_m3), ("probe mass", probe_mass_kg)):
        if value <= 0.0:
            raise ValueError(f"{name} must be positive")
    bracket = 0.5 * (4.0 * math.pi * density_kg_m3 / 3.0) ** (2.0 / 3.0) * constants.G * mass_kg ** (1.0 / 3.0)
    return (constants.hbar / probe_mass_kg) ** (1.0 / 3.0) * bracket ** (-2.0 / 3.0)


@dataclass(frozen=True)
class FeasibilityCurve:
    """t_min against tau_g across a mass grid, with the feasibility verdicts."""

    masses: np.ndarray      # kg
    t_min: np.ndarray       # s
    t_max: np.ndarray       # tau_g, s
    feasible: np.ndarray    # bool
    density: float
    probe_mass_fraction: float
    margin: float
    proton_mass: float = field(default=CONSTANTS.m_p)

    def write_csv(self, path) -> None:
        from .csvio import write_csv

        write_csv(
            path,
            ["M_kg", "M_over_mp", "t_min_s", "tau_g_s", "feasible"],
            [self.masses, self.masses / self.proton_mass, self.t_min, self.t_max, self.feasible],
        )

    @property
    def any_feasible(self) -> bool:
        return bool(np.any(self.feasible))


def default_mass_grid(
    n_points: int = 200,
    lo_protons: float = MASS_THRESHOLD_PROTONS,
    hi_protons: float = 1.0e18,
    constants: PhysConstants = CONSTANTS,
) -> np.ndarray:
    return np.logspace(
        math.log10(lo_protons), math.log10(hi_protons), int(n_points)
    ) * constants.m_p


def interdiction_scan(
    masses_kg,
    density_kg_m3: float,
    probe_mass_fraction: float = 1.0e-6,
    margin: float = 10.0,
    constants: PhysConstants = CONSTANTS,
) -> FeasibilityCurve:
    """Evaluate both time bounds over a mass grid.

    probe_mass_fraction sets m = fraction * M per grid point. A mass is
    feasible iff t_min <= tau_g / margin (both boundaries inclusive, the
    conservative direction for an emptiness claim).
    """
    masses = np.asarray(masses_kg, dtype=float)
    if masses.size == 0:
        raise ValueError("empty mass range")
    if np.any(masses <= 0.0):
        raise ValueError("masses must be positive")
    if not (0.0 < probe_mass_fraction < 1.0):
        raise ValueError("probe mass fraction must lie in (0, 1)")
    if margin < 1.0:
        raise ValueError("margin must be >= 1")
    lower = np.array(
        [t_min(m, density_kg_m3, probe_mass_fraction * m, constants) for m in masses]
    )
    upper = np.array([float(tau_g(m, density_kg_m3, constants)) for m in masses])
    feasible = lower <= upper / margin
    return FeasibilityCurve(
        masses, lower, upper, feasible,
        density_kg_m3, probe_mass_fraction, margin, constants.m_p,
    )
