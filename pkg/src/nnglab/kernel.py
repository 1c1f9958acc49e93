"""Localized mass profiles and the mutual Newtonian energy integral.

The kernel behind every phase in the model is

    I(d) = integral n(x) n(y - d zhat) / |x - y| dx dy        [1/length]

for a normalized localization profile n (integral n = 1; the mass enters
phases as an external m^2 factor). Two profile families are supported:

  uniform sphere, radius R:
      I(d) = 1/d                                        for d >= 2R
      I(d) = (1/R) (6/5 - x^2/2 + 3 x^3/16 - x^5/160)   for x = d/R < 2

      The interior polynomial is the standard overlap result; it meets 1/d
      at d = 2R with matching slope and gives the self-energy value 6/(5R)
      at d = 0. It is cross-checked against the Monte Carlo estimator below.

  isotropic Gaussian, per-axis width sigma:
      I(d) = erf(d / (2 sigma)) / d,   with I(0) = 1 / (sigma sqrt(pi)).

`pair_integral_mc` is a deliberately independent route: sample x from one
profile, y from the other, average 1/|x - y|. It exists to check the closed
forms, never to replace them.

Phases: a hidden replica localized at z_j shifts the (z_h, z_k) coherence
by the antisymmetric combination

    phase = (m^2 G t / 2 hbar) * [I(|z_j - z_h|) - I(|z_j - z_k|)].

That 1/2 is the nominal bookkeeping factor. Evolving the two-replica system
directly under the pair Hamiltonian -G m^2 I(d) produces exactly twice this
phase per hidden site, so the resolved convention multiplies the nominal
phase by PHASE_CONVENTION = 2. The factor lives here, once, and every
consumer (closed-form elements, brute-force evolution, the two-replica
protocol) routes through it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .constants import CONSTANTS, PhysConstants

__all__ = [
    "MassProfile",
    "uniform_sphere",
    "gaussian_cloud",
    "pair_integral",
    "pair_integral_mc",
    "MCEstimate",
    "PairEnergyTable",
    "coherence_phase",
    "PHASE_CONVENTION",
]

# Ratio between the physical per-hidden-site phase (from direct Hamiltonian
# evolution) and the nominal (m^2 G t / 2 hbar) * [I_jh - I_jk] bookkeeping
# form. Fixed by the N=2 oracle in reduction.py; do not fold into formulas.
PHASE_CONVENTION = 2.0

# Below this separation (meters) the Gaussian form switches to its d -> 0
# limit to avoid 0/0 in erf(d)/d.
_CLAMP_M = 1.0e-15


@dataclass(frozen=True)
class MassProfile:
    """Normalized localization profile with the lump's total mass attached.

    kind is 'uniform_sphere' (radius set) or 'gaussian' (sigma set). The
    profile n integrates to 1; mass multiplies externally in phases.
    """

    kind: str
    mass: float
    radius: float = 0.0
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.mass <= 0.0:
            raise ValueError(f"profile mass must be positive, got {self.mass}")
        if self.kind == "uniform_sphere":
            if self.radius <= 0.0:
                raise ValueError("uniform_sphere profile needs radius > 0")
        elif self.kind == "gaussian":
            if self.sigma <= 0.0:
                raise ValueError("gaussian profile needs sigma > 0")
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")

    @property
    def size_scale(self) -> float:
        return self.radius if self.kind == "uniform_sphere" else self.sigma


def uniform_sphere(mass: float, radius: float) -> MassProfile:
    return MassProfile("uniform_sphere", mass, radius=radius)


def gaussian_cloud(mass: float, sigma: float) -> MassProfile:
    return MassProfile("gaussian", mass, sigma=sigma)


def pair_integral(profile: MassProfile, d):
    """Closed-form I(d) in 1/m. Accepts a scalar or an array of separations."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr < 0.0):
        raise ValueError("separation must be non-negative")
    if profile.kind == "gaussian":
        s = profile.sigma
        safe = np.maximum(d_arr, _CLAMP_M)
        values = np.where(
            d_arr < _CLAMP_M,
            1.0 / (s * math.sqrt(math.pi)),
            erf(safe / (2.0 * s)) / safe,
        )
    else:
        r = profile.radius
        x = d_arr / r
        inner = (6.0 / 5.0 - 0.5 * x**2 + (3.0 / 16.0) * x**3 - x**5 / 160.0) / r
        with np.errstate(divide="ignore"):
            outer = np.where(d_arr > 0.0, 1.0 / np.maximum(d_arr, _CLAMP_M), 0.0)
        values = np.where(x < 2.0, inner, outer)
    if np.isscalar(d) or d_arr.ndim == 0:
        return float(values)
    return values


def _sample(profile: MassProfile, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n points from the profile density, shape (n, 3)."""
    if profile.kind == "gaussian":
        return rng.normal(0.0, profile.sigma, size=(n, 3))
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = profile.radius * rng.random(n) ** (1.0 / 3.0)
    return direction * radius[:, None]


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float


def pair_integral_mc(profile: MassProfile, d: float, samples: int, seed: int) -> MCEstimate:
    """Unbiased Monte Carlo estimate of I(d) with its standard error.

    Deterministic for a fixed seed. The estimator is mean(1/|x - y|) with
    x ~ n, y ~ n shifted by d; its variance is finite for both profile
    families, including full overlap.
    """
    n = int(samples)
    if n < 1000:
        raise ValueError(f"at least 1000 samples required, got {samples}")
    if d < 0.0:
        raise ValueError("separation must be non-negative")
    rng = np.random.default_rng(seed)
    x = _sample(profile, rng, n)
    y = _sample(profile, rng, n)
    y[:, 2] += d
    inv = 1.0 / np.linalg.norm(x - y, axis=1)
    estimate = float(np.mean(inv))
    stderr = float(np.std(inv, ddof=1) / math.sqrt(n))
    return MCEstimate(estimate, stderr)


@dataclass(frozen=True)
class PairEnergyTable:
    """Cached I(d) samples for one profile, CSV round-trippable."""

    profile: MassProfile
    distances: np.ndarray
    values: np.ndarray

    @classmethod
    def build(cls, profile: MassProfile, distances) -> "PairEnergyTable":
        d = np.asarray(distances, dtype=float)
        return cls(profile, d, pair_integral(profile, d))

    def write_csv(self, path) -> None:
        from .csvio import write_csv

        write_csv(path, ["d_m", "I_per_m"], [self.distances, self.values])

    @staticmethod
    def read_csv(path, profile: MassProfile) -> "PairEnergyTable":
        data = np.genfromtxt(path, delimiter=",", skip_header=1)
        data = np.atleast_2d(data)
        return PairEnergyTable(profile, data[:, 0].copy(), data[:, 1].copy())


def coherence_phase(
    profile: MassProfile,
    t: float,
    z_j,
    z_h,
    z_k,
    constants: PhysConstants = CONSTANTS,
) -> float:
    """Nominal phase a hidden replica at z_j adds to the (z_h, z_k) coherence.

    (m^2 G t / 2 hbar) * [I(|z_j - z_h|) - I(|z_j - z_k|)]; antisymmetric
    under h <-> k and linear in t. Multiply by PHASE_CONVENTION to get the
    physical phase.
    """
    if t < 0.0:
        raise ValueError("time must be non-negative")
    z_j = np.asarray(z_j, dtype=float)
    d_h = float(np.linalg.norm(z_j - np.asarray(z_h, dtype=float)))
    d_k = float(np.linalg.norm(z_j - np.asarray(z_k, dtype=float)))
    prefactor = profile.mass**2 * constants.G * t / (2.0 * constants.hbar)
    return prefactor * (pair_integral(profile, d_h) - pair_integral(profile, d_k))
