"""Characteristic scales: values, scaling laws, dimension checking."""

import math

import pytest

from nnglab.constants import (
    CONSTANTS,
    SPREADING_TIME_S,
    Dim,
    DimensionError,
    PhysConstants,
    Quantity,
    above_threshold,
    localization_width,
    parse_quantity,
    sphere_radius,
    tau_g,
)

M_P = CONSTANTS.m_p


class TestTauG:
    def test_sand_grain_order(self):
        # 1e-6 g at 2 g/cm^3: a very fine grain of sand
        value = float(tau_g(1.0e-9, 2000.0))
        assert 1.0e-11 <= value <= 1.0e-9
        assert value == pytest.approx(1.25e-10, rel=0.05)

    def test_dimension_is_time(self):
        assert tau_g(1.0, 1000.0).dim is Dim.TIME

    def test_mass_exponent_doubling(self):
        # scaling M by 2^(-3/5) doubles tau_g (exponent -5/3)
        base = float(tau_g(1.0e-9, 2000.0))
        scaled = float(tau_g(1.0e-9 * 2.0 ** (-3.0 / 5.0), 2000.0))
        assert scaled == pytest.approx(2.0 * base, rel=1e-12)

    def test_dual_unit_system_oracle(self):
        # same number computed in SI and in cgs must coincide
        mass_kg = 1.0e11 * M_P
        rho_si = 1000.0
        si = float(tau_g(mass_kg, rho_si))
        g_cgs = CONSTANTS.G * 1.0e3          # cm^3 g^-1 s^-2
        hbar_cgs = CONSTANTS.hbar * 1.0e7    # erg s
        mass_g = mass_kg * 1.0e3
        rho_cgs = rho_si * 1.0e-3            # g/cm^3
        cgs = hbar_cgs / (g_cgs * mass_g ** (5.0 / 3.0) * rho_cgs ** (1.0 / 3.0))
        assert si == pytest.approx(cgs, rel=1e-12)

    def test_monotone_decreasing(self):
        masses = [1e-12, 1e-10, 1e-8]
        values = [float(tau_g(m, 2000.0)) for m in masses]
        assert values[0] > values[1] > values[2]
        rhos = [500.0, 1000.0, 4000.0]
        values = [float(tau_g(1e-9, r)) for r in rhos]
        assert values[0] > values[1] > values[2]

    @pytest.mark.parametrize("mass,rho", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
    def test_rejects_nonpositive(self, mass, rho):
        with pytest.raises(ValueError):
            tau_g(mass, rho)


class TestLocalizationWidth:
    def test_proton_gives_one_cm(self):
        assert float(localization_width(M_P)) == pytest.approx(1.0e-2, rel=1e-12)

    def test_heavy_lump(self):
        # 1e12 proton masses localize at 1e-6 cm = 1e-8 m
        assert float(localization_width(1.0e12 * M_P)) == pytest.approx(1.0e-8, rel=1e-12)

    def test_sqrt_scaling(self):
        assert float(localization_width(4.0 * M_P)) == pytest.approx(0.5e-2, rel=1e-12)

    def test_strictly_decreasing(self):
        widths = [float(localization_width(m)) for m in (1e-20, 1e-15, 1e-10)]
        assert widths[0] > widths[1] > widths[2]

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            localization_width(0.0)


class TestThreshold:
    def test_above(self):
        assert above_threshold(1.0e12 * M_P)

    def test_below(self):
        assert not above_threshold(M_P)

    def test_boundary_inclusive(self):
        assert above_threshold(1.0e11 * M_P)


class TestQuantity:
    def test_same_dimension_arithmetic(self):
        a = Quantity(2.0, Dim.TIME)
        b = Quantity(3.0, Dim.TIME)
        assert (a + b).value == 5.0
        assert (b - a).value == 1.0
        assert (2.0 * a).value == 4.0
        assert a < b

    def test_mismatched_dimensions_rejected(self):
        a = Quantity(2.0, Dim.TIME)
        b = Quantity(3.0, Dim.MASS)
        with pytest.raises(DimensionError):
            _ = a + b
        with pytest.raises(DimensionError):
            _ = a < b
        with pytest.raises(DimensionError):
            _ = a * b

    def test_constants_immutable_and_positive(self):
        with pytest.raises(Exception):
            CONSTANTS.G = 1.0
        with pytest.raises(ValueError):
            PhysConstants(G=-1.0)


class TestParsing:
    @pytest.mark.parametrize(
        "text,dim,expected",
        [
            ("1e-6 g", Dim.MASS, 1.0e-9),
            ("1e-6g", Dim.MASS, 1.0e-9),
            ("2 kg", Dim.MASS, 2.0),
            ("1e12 mp", Dim.MASS, 1.0e12 * M_P),
            ("2 g/cm3", Dim.DENSITY, 2000.0),
            ("2g/cm3", Dim.DENSITY, 2000.0),
            ("1 cm", Dim.LENGTH, 1.0e-2),
            ("1.5", Dim.TIME, 1.5),
        ],
    )
    def test_accepted(self, text, dim, expected):
        assert parse_quantity(text, dim).value == pytest.approx(expected, rel=1e-12)

    def test_wrong_unit_rejected(self):
        with pytest.raises(ValueError, match="kg"):
            parse_quantity("2 kg", Dim.DENSITY)

    def test_garbage_rejected(self):
        with pytest.raises(ValueError):
            parse_quantity("grams", Dim.MASS)


def test_spreading_time_is_a_constant():
    assert SPREADING_TIME_S == 1.0e3


def test_sphere_radius_roundtrip():
    r = sphere_radius(1.0e-9, 2000.0)
    volume = 4.0 / 3.0 * math.pi * r**3
    assert volume * 2000.0 == pytest.approx(1.0e-9, rel=1e-12)
