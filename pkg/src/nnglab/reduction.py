"""Reduction dynamics of a superposition of localized states.

A lump prepared in an equal superposition over sites z_1..z_NN, replicated
N times with cross-replica Newtonian attraction, has reduced-density-matrix
elements with the closed form

    <z_h| rho(t) |z_k> = (1/NN^N) * [ sum_j exp(i phi_j / (N-1)) ]^(N-1)

where phi_j = PHASE_CONVENTION * (m^2 G t / 2 hbar) * [I(|z_j - z_h|) -
I(|z_j - z_k|)] is the phase contributed by a hidden replica sitting at
site j. Diagonals stay pinned at 1/NN; off-diagonals decay through random
phase cancellation at finite N and survive untouched as N -> infinity,
which is the mean-field (single-body nonlinear) limit.

Everything here is checked against `brute_force_reduced_rho`, which never
touches the closed form: it builds the full two-replica state over the
NN^2 site pairs, applies the diagonal pair-interaction phases of the
Hamiltonian (coupling G/(N-1), attractive), and partial-traces the hidden
replica with an einsum. Agreement of the two routes is what fixes
PHASE_CONVENTION.

Large N: [sum_j ...]^(N-1) is evaluated in split magnitude/phase form,
exp((N-1) log|S| + i (N-1) arg S); naive powering underflows near N ~ 1e3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import CONSTANTS, PhysConstants, sphere_radius, tau_g
from .kernel import PHASE_CONVENTION, MassProfile, pair_integral, uniform_sphere

__all__ = [
    "ReductionConfig",
    "ReductionResult",
    "ReductionTimeError",
    "grid_cluster",
    "cigar_cluster",
    "default_cluster_config",
    "matrix_element",
    "element_matrix",
    "brute_force_reduced_rho",
    "decay_curve",
    "DecayCurve",
    "ns_limit_deviation",
    "estimate_reduction_time",
]


class ReductionTimeError(RuntimeError):
    """The coherence curve has no stable 1/e crossing."""


@dataclass(frozen=True)
class ReductionConfig:
    """Sites, profile, replica count and time grid for one reduction run.

    Initial weights are uniform (1/sqrt(NN) per site); the sites must be
    distinct. n_replicas is the hidden-copy family size N >= 2.
    """

    sites: np.ndarray
    profile: MassProfile
    n_replicas: int = 2
    t_grid: np.ndarray = field(default_factory=lambda: np.array([]))

    def __post_init__(self) -> None:
        sites = np.atleast_2d(np.asarray(self.sites, dtype=float))
        if sites.shape[1] != 3 or sites.shape[0] < 2:
            raise ValueError("sites must be an (NN >= 2, 3) array of positions")
        diff = sites[:, None, :] - sites[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        off = dist[~np.eye(sites.shape[0], dtype=bool)]
        if np.any(off == 0.0):
            raise ValueError("sites must be distinct")
        if int(self.n_replicas) < 2:
            raise ValueError(f"replica count must be >= 2, got {self.n_replicas}")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "n_replicas", int(self.n_replicas))
        object.__setattr__(self, "t_grid", np.asarray(self.t_grid, dtype=float))

    @property
    def n_sites(self) -> int:
        return self.sites.shape[0]

    def distance_matrix(self) -> np.ndarray:
        diff = self.sites[:, None, :] - self.sites[None, :, :]
        return np.linalg.norm(diff, axis=-1)

    def pair_energies(self) -> np.ndarray:
        """I(|z_a - z_b|) for all site pairs, diagonal included."""
        return pair_integral(self.profile, self.distance_matrix())

    def material_density(self) -> float:
        """Density implied by the profile, for tau_g comparisons."""
        m = self.profile.mass
        if self.profile.kind == "uniform_sphere":
            r = self.profile.radius
        else:
            # radius of the uniform sphere with the same self-energy 6/(5R)
            r = 1.2 * math.sqrt(math.pi) * self.profile.sigma
        return 3.0 * m / (4.0 * math.pi * r**3)


def grid_cluster(n_sites: int, spacing: float) -> np.ndarray:
    """First n_sites points of a cubic lattice with the given spacing."""
    if n_sites < 1 or spacing <= 0.0:
        raise ValueError("need n_sites >= 1 and spacing > 0")
    side = math.ceil(n_sites ** (1.0 / 3.0))
    pts = []
    for ix in range(side):
        for iy in range(side):
            for iz in range(side):
                pts.append((ix, iy, iz))
                if len(pts) == n_sites:
                    break
            if len(pts) == n_sites:
                break
        if len(pts) == n_sites:
            break
    arr = np.asarray(pts, dtype=float) * spacing
    return arr - arr.mean(axis=0)


def cigar_cluster(n_sites: int, spacing: float) -> np.ndarray:
    """n_sites in a single line; elongated distributions reduce more slowly."""
    if n_sites < 1 or spacing <= 0.0:
        raise ValueError("need n_sites >= 1 and spacing > 0")
    arr = np.zeros((n_sites, 3))
    arr[:, 0] = np.arange(n_sites) * spacing
    return arr - arr.mean(axis=0)


def default_cluster_config(
    mass_kg: float,
    density_kg_m3: float,
    n_sites: int = 64,
    n_replicas: int = 2,
    spacing: float | None = None,
    geometry: str = "grid",
    t_grid: np.ndarray | None = None,
) -> ReductionConfig:
    """Cluster of CM position states for a lump of given mass and density.

    The profile is the body itself (uniform sphere at its material density)
    and the default lattice spacing is one body radius: the superposition
    spans the body scale, where the pair energies vary by order 1/R and the
    dephasing time lands on tau_g. Much finer spacings suppress the phase
    spread quadratically and push reduction far beyond tau_g.
    """
    radius = sphere_radius(mass_kg, density_kg_m3)
    step = radius if spacing is None else float(spacing)
    builder = {"grid": grid_cluster, "cigar": cigar_cluster}.get(geometry)
    if builder is None:
        raise ValueError(f"unknown geometry {geometry!r}")
    sites = builder(n_sites, step)
    if t_grid is None:
        t_ref = float(tau_g(mass_kg, density_kg_m3))
        t_grid = np.linspace(0.0, 10.0 * t_ref, 101)
    return ReductionConfig(sites, uniform_sphere(mass_kg, radius), n_replicas, t_grid)


# ---------------------------------------------------------------------------
# Closed form and oracle
# ---------------------------------------------------------------------------


def _site_phase_rates(cfg: ReductionConfig, constants: PhysConstants) -> np.ndarray:
    """theta[j, h] / t: physical phase rate between hidden site j and site h."""
    prefactor = PHASE_CONVENTION * cfg.profile.mass**2 * constants.G / (2.0 * constants.hbar)
    return prefactor * cfg.pair_energies()


def element_matrix(cfg: ReductionConfig, t: float, constants: PhysConstants = CONSTANTS) -> np.ndarray:
    """All NN x NN reduced-matrix elements at time t via the closed form."""
    if t < 0.0:
        raise ValueError("time must be non-negative")
    n = cfg.n_replicas
    nn = cfg.n_sites
    theta = _site_phase_rates(cfg, constants) * t / (n - 1)
    phasors = np.exp(1j * theta)                       # phasors[j, h]
    s = (phasors.T @ phasors.conj()) / nn              # s[h, k] = mean_j e^{i(theta_jh - theta_jk)}
    mag = np.abs(s)
    ang = np.angle(s)
    with np.errstate(divide="ignore"):
        log_mag = np.where(mag > 0.0, np.log(np.maximum(mag, 1e-300)), -np.inf)
    out = np.exp((n - 1) * log_mag) * np.exp(1j * (n - 1) * ang) / nn
    return out


def matrix_element(
    cfg: ReductionConfig, h: int, k: int, t: float, constants: PhysConstants = CONSTANTS
) -> complex:
    """<z_h| rho(t) |z_k> from the closed form, stable for N up to ~1e7."""
    nn = cfg.n_sites
    if not (0 <= h < nn and 0 <= k < nn):
        raise ValueError(f"site indices must lie in [0, {nn}), got ({h}, {k})")
    if t < 0.0:
        raise ValueError("time must be non-negative")
    n = cfg.n_replicas
    theta = _site_phase_rates(cfg, constants) * t
    phi = (theta[:, h] - theta[:, k]) / (n - 1)
    s = np.mean(np.exp(1j * phi))
    mag = abs(s)
    if mag == 0.0:
        return 0.0 + 0.0j
    value = math.exp((n - 1) * math.log(mag)) * np.exp(1j * (n - 1) * np.angle(s))
    return complex(value / nn)


def brute_force_reduced_rho(
    cfg: ReductionConfig, t: float, constants: PhysConstants = CONSTANTS
) -> np.ndarray:
    """Direct two-replica evolution and partial trace; the convention oracle.

    Builds the product state (1/NN) sum_{j,l} |z_j>|z_l>, applies the
    diagonal phases exp(+i G m^2 I_jl t / hbar) of the attractive pair
    Hamiltonian with coupling G/(N-1) = G, and traces out the hidden
    replica. No closed-form shortcut anywhere.
    """
    if cfg.n_replicas != 2:
        raise ValueError("the brute-force oracle is defined for exactly 2 replicas")
    nn = cfg.n_sites
    if nn > 8:
        raise ValueError(f"state dimension NN^2 too large for the oracle (NN = {nn} > 8)")
    if t < 0.0:
        raise ValueError("time must be non-negative")
    coupling = constants.G / (cfg.n_replicas - 1)
    energies = -coupling * cfg.profile.mass**2 * cfg.pair_energies()   # E[j, l], attractive
    amps = np.full((nn, nn), 1.0 / nn, dtype=complex)
    amps = amps * np.exp(-1j * energies * t / constants.hbar)
    return np.einsum("jl,kl->jk", amps, amps.conj())


@dataclass(frozen=True)
class ReductionResult:
    """Matrix elements at one time with the coherence summary."""

    t: float
    elements: np.ndarray
    offdiag_magnitude: float


def _mean_offdiag_coherence(elements: np.ndarray) -> float:
    nn = elements.shape[0]
    off = ~np.eye(nn, dtype=bool)
    return float(np.mean(np.abs(elements[off])) * nn)


def reduction_result(cfg: ReductionConfig, t: float, constants: PhysConstants = CONSTANTS) -> ReductionResult:
    elements = element_matrix(cfg, t, constants)
    return ReductionResult(t, elements, _mean_offdiag_coherence(elements))


@dataclass(frozen=True)
class DecayCurve:
    """Mean off-diagonal coherence (NN * |element|, 1 = fully coherent)."""

    t: np.ndarray
    coherence: np.ndarray

    def write_csv(self, path) -> None:
        from .csvio import write_csv

        write_csv(path, ["t_s", "mean_offdiag_coherence"], [self.t, self.coherence])


def decay_curve(cfg: ReductionConfig, constants: PhysConstants = CONSTANTS) -> DecayCurve:
    if cfg.t_grid.size == 0:
        raise ValueError("config carries an empty time grid")
    if np.any(np.diff(cfg.t_grid) <= 0.0):
        raise ValueError("time grid must be strictly increasing")
    values = [_mean_offdiag_coherence(element_matrix(cfg, t, constants)) for t in cfg.t_grid]
    return DecayCurve(cfg.t_grid.copy(), np.asarray(values))


def ns_limit_deviation(
    cfg: ReductionConfig,
    h: int,
    k: int,
    t: float,
    n_list,
    constants: PhysConstants = CONSTANTS,
) -> list[tuple[int, float]]:
    """|NN * element - exp(i phibar)| for each replica count in n_list.

    phibar is the site-average of the physical phases; the deviation falls
    off as 1/N, which is the approach to the mean-field limit where the
    coherences keep magnitude 1/NN forever.
    """
    n_values = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("replica counts must be strictly increasing")
    if max(n_values) > 10**7:
        raise ValueError("replica counts above 1e7 are not supported")
    theta = _site_phase_rates(cfg, constants) * t
    phibar = float(np.mean(theta[:, h] - theta[:, k]))
    target = np.exp(1j * phibar)
    rows = []
    for n in n_values:
        sub = ReductionConfig(cfg.sites, cfg.profile, n, cfg.t_grid)
        element = matrix_element(sub, h, k, t, constants)
        rows.append((n, float(abs(cfg.n_sites * element - target))))
    return rows


def estimate_reduction_time(
    cfg: ReductionConfig,
    constants: PhysConstants = CONSTANTS,
    *,
    window: float = 100.0,
    scan_points: int = 240,
) -> float:
    """First stable 1/e crossing of the coherence curve, by bisection.

    Scans [1e-4, window] * tau_g on a log grid, bisects the first bracket
    that dips below 1/e, then demands the curve stay below 1/e over
    [t*, 5 t*]: a small superposition (e.g. two separated sites) oscillates
    back to full coherence and is reported as a diagnostic failure instead
    of a time.
    """
    target = 1.0 / math.e
    t_ref = float(tau_g(cfg.profile.mass, cfg.material_density(), constants))

    def coherence(t: float) -> float:
        return _mean_offdiag_coherence(element_matrix(cfg, t, constants))

    grid = t_ref * np.logspace(-4.0, math.log10(window), scan_points)
    below = None
    prev = 0.0
    for i, t in enumerate(grid):
        if coherence(float(t)) < target:
            below = float(t)
            prev = float(grid[i - 1]) if i > 0 else 0.0
            break
    if below is None:
        raise ReductionTimeError(
            f"coherence never drops below 1/e within {window:g} tau_g "
            f"(tau_g = {t_ref:.3e} s); superposition does not reduce on this window"
        )
    lo, hi = prev, below
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if coherence(mid) < target:
            hi = mid
        else:
            lo = mid
    t_star = hi
    check = np.linspace(t_star, 5.0 * t_star, 48)
    wobble = max(coherence(float(t)) for t in check[1:])
    if wobble > target + 0.05:
        raise ReductionTimeError(
            f"coherence re-grows to {wobble:.3f} after the first 1/e dip at "
            f"{t_star:.3e} s: oscillatory superposition, no monotone reduction"
        )
    return t_star
