"""Physical constants, dimension-tagged quantities, and characteristic scales.

Everything downstream works in SI units. The model has three characteristic
scales for a lump of mass M and material density rho:

  - gravitational reduction time   tau_g = hbar / (G * M^(5/3) * rho^(1/3))
  - localization width             (m_p / M)^(1/2) * 1 cm
  - self-localization threshold    M >= 1e11 proton masses

plus one mass-independent constant, the metamass spreading time of 1e3 s,
which is quoted, never computed.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass


class Dim(enum.Enum):
    MASS = "mass"
    LENGTH = "length"
    TIME = "time"
    DENSITY = "density"
    ENERGY = "energy"
    DIMENSIONLESS = "dimensionless"


class DimensionError(ValueError):
    """Arithmetic between quantities of different dimensions."""


@dataclass(frozen=True)
class Quantity:
    """A real value tagged with one of the supported dimensions.

    Addition, subtraction and comparison require matching dimensions;
    scaling by a bare number is always allowed.
    """

    value: float
    dim: Dim

    def _check(self, other: "Quantity") -> None:
        if not isinstance(other, Quantity):
            raise DimensionError(f"expected Quantity, got {type(other).__name__}")
        if other.dim is not self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim.value} vs {other.dim.value}")

    def __add__(self, other: "Quantity") -> "Quantity":
        self._check(other)
        return Quantity(self.value + other.value, self.dim)

    def __sub__(self, other: "Quantity") -> "Quantity":
        self._check(other)
        return Quantity(self.value - other.value, self.dim)

    def __mul__(self, scalar: float) -> "Quantity":
        if isinstance(scalar, Quantity):
            raise DimensionError("quantity * quantity is not supported; scale by a bare number")
        return Quantity(self.value * float(scalar), self.dim)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Quantity":
        if isinstance(scalar, Quantity):
            raise DimensionError("quantity / quantity is not supported; scale by a bare number")
        return Quantity(self.value / float(scalar), self.dim)

    def __lt__(self, other: "Quantity") -> bool:
        self._check(other)
        return self.value < other.value

    def __le__(self, other: "Quantity") -> bool:
        self._check(other)
        return self.value <= other.value

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class PhysConstants:
    """CODATA values, fixed at build time. SI units throughout."""

    G: float = 6.67430e-11            # m^3 kg^-1 s^-2
    hbar: float = 1.054571817e-34     # J s
    m_p: float = 1.67262192369e-27    # kg
    c: float = 299792458.0            # m s^-1

    def __post_init__(self) -> None:
        for name in ("G", "hbar", "m_p", "c"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"constant {name} must be strictly positive")


CONSTANTS = PhysConstants()

# Metamass spreading time of the localized states, seconds. Mass independent;
# quoted as a fixed scale for comparison against reduction times.
SPREADING_TIME_S = 1.0e3

# Self-localization threshold in proton masses. The sources quote both 1e11
# and 1e12; 1e11 is the default and the comparison is inclusive.
MASS_THRESHOLD_PROTONS = 1.0e11


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


def tau_g(mass_kg: float, density_kg_m3: float, constants: PhysConstants = CONSTANTS) -> Quantity:
    """Gravitational reduction time hbar / (G * M^(5/3) * rho^(1/3)).

    For a fine grain of sand (1e-6 g at 2 g/cm^3) this is ~1e-10 s.
    Strictly decreasing in both arguments.
    """
    m = _positive("mass", mass_kg)
    rho = _positive("density", density_kg_m3)
    value = constants.hbar / (constants.G * m ** (5.0 / 3.0) * rho ** (1.0 / 3.0))
    return Quantity(value, Dim.TIME)


def localization_width(mass_kg: float, constants: PhysConstants = CONSTANTS) -> Quantity:
    """Width of a single localized state, (m_p / M)^(1/2) * 1 cm, in meters."""
    m = _positive("mass", mass_kg)
    return Quantity(math.sqrt(constants.m_p / m) * 1.0e-2, Dim.LENGTH)


def above_threshold(
    mass_kg: float,
    threshold_protons: float = MASS_THRESHOLD_PROTONS,
    constants: PhysConstants = CONSTANTS,
) -> bool:
    """True iff the mass sits at or above the self-localization threshold."""
    m = _positive("mass", mass_kg)
    return m >= threshold_protons * constants.m_p


def sphere_radius(mass_kg: float, density_kg_m3: float) -> float:
    """Radius of a uniform sphere of the given mass and density, meters."""
    m = _positive("mass", mass_kg)
    rho = _positive("density", density_kg_m3)
    return (3.0 * m / (4.0 * math.pi * rho)) ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# Unit conversion at the boundary. Inputs may use g / cm / proton masses;
# everything is converted to SI exactly once, here.
# ---------------------------------------------------------------------------

_MASS_UNITS = {"kg": 1.0, "g": 1.0e-3, "mg": 1.0e-6, "mp": CONSTANTS.m_p, "m_p": CONSTANTS.m_p}
_LENGTH_UNITS = {"m": 1.0, "cm": 1.0e-2, "mm": 1.0e-3, "um": 1.0e-6, "nm": 1.0e-9}
_TIME_UNITS = {"s": 1.0, "ms": 1.0e-3, "us": 1.0e-6, "ns": 1.0e-9}
_DENSITY_UNITS = {"kg/m3": 1.0, "g/cm3": 1.0e3, "g/cc": 1.0e3}

_UNIT_TABLES = {
    Dim.MASS: _MASS_UNITS,
    Dim.LENGTH: _LENGTH_UNITS,
    Dim.TIME: _TIME_UNITS,
    Dim.DENSITY: _DENSITY_UNITS,
}


_QUANTITY_RE = re.compile(r"^([+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)\s*(.*)$")


def parse_quantity(text: str, dim: Dim) -> Quantity:
    """Parse '1e-6 g', '2g/cm3', '1e12 mp', ... into an SI Quantity.

    A bare number is accepted as already-SI. Unknown or dimensionally wrong
    units raise ValueError naming the offending unit.
    """
    s = str(text).strip()
    if dim is Dim.DIMENSIONLESS:
        return Quantity(float(s), dim)
    match = _QUANTITY_RE.match(s)
    if match is None:
        raise ValueError(f"no numeric part in {text!r}")
    value = float(match.group(1))
    unit = match.group(2).strip()
    if not unit:
        return Quantity(value, dim)
    table = _UNIT_TABLES.get(dim)
    if table is None or unit not in table:
        raise ValueError(f"unit {unit!r} is not a {dim.value} unit")
    return Quantity(value * table[unit], dim)
