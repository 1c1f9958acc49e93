"""Two-replica branch-communication protocol on a qubit + pointer pair.

Protocol. A qubit is measured against a recording system M whose outcome
states M1, M2 are two disjoint clusters of localized position states (mass
m, one cluster per outcome). The observer on the M2 branch either does
nothing (case 'a', qubit left in |0>) or rotates the qubit into
|i> = (|1> + i|0>)/sqrt(2) (case 'b'). In the replica picture the whole
qubit (x) pointer system is doubled, so the prepared metastate is the
symmetric product

    (1/2) (|1 M1> + |e2 M2>) (x) (hidden copy of the same),

with e2 = |i> of |0> according to the case. Gravity couples the two
replicas' pointer masses only: evolution multiplies each (site_a,
hidden site_b) amplitude by exp(i G m^2 I(d_ab) t / hbar), the same
attractive pair convention the reduction oracle fixes.

Observables. `reduced_qubit` traces out the pointer and the entire hidden
replica; `sigma3` reads the Pauli-z expectation in the {|1>, |0>} basis
(|1> is the +1 eigenstate). `everett_signal` is the case difference
|<s3>_b(t) - <s3>_a(t)|.

A structural fact worth stating once: the coupling is diagonal in pointer
positions and never touches either qubit, so sigma3 of the reduced qubit
commutes with the full evolution and the signal is exactly its preparation
value (1/2) at every time and every coupling strength. What does evolve is
the inter-branch coherence <1 M1| rho |e2 M2> of the physical qubit (x)
pointer state: `branch_coherence` tracks it, and for pointer masses above
threshold it collapses by random phase cancellation on the reduction
timescale, which is the mechanism that shuts the communication channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS, PhysConstants, localization_width, tau_g
from .kernel import MassProfile, gaussian_cloud, pair_integral
from .reduction import grid_cluster

__all__ = [
    "PointerConfig",
    "Metastate2",
    "QubitDensity",
    "KET_ONE",
    "KET_ZERO",
    "KET_I",
    "footnote_pointer_config",
    "prepare",
    "evolve",
    "reduced_qubit",
    "sigma3",
    "everett_signal",
    "branch_coherence",
    "signal_sweep",
    "SignalSweep",
]

# Qubit basis: index 0 is |1> (sigma3 = +1), index 1 is |0> (sigma3 = -1).
KET_ONE = np.array([1.0, 0.0], dtype=complex)
KET_ZERO = np.array([0.0, 1.0], dtype=complex)
KET_I = (KET_ONE + 1j * KET_ZERO) / math.sqrt(2.0)

_CASE_BRANCH2 = {"a": KET_ZERO, "b": KET_I}


@dataclass(frozen=True)
class PointerConfig:
    """Two disjoint site clusters for the pointer states M1 / M2.

    material_density only feeds the tau_g reference used to normalize time
    axes; the gravitational phases come from the profile itself.
    """

    mass: float
    cluster_1: np.ndarray
    cluster_2: np.ndarray
    profile: MassProfile
    material_density: float = 1000.0

    def __post_init__(self) -> None:
        c1 = np.atleast_2d(np.asarray(self.cluster_1, dtype=float))
        c2 = np.atleast_2d(np.asarray(self.cluster_2, dtype=float))
        if c1.shape != c2.shape or c1.shape[1] != 3:
            raise ValueError("clusters must be equal-shaped (n, 3) arrays")
        cross = np.linalg.norm(c1[:, None, :] - c2[None, :, :], axis=-1)
        if np.min(cross) == 0.0:
            raise ValueError("clusters must be disjoint")
        if self.mass <= 0.0 or self.material_density <= 0.0:
            raise ValueError("mass and material_density must be positive")
        object.__setattr__(self, "cluster_1", c1)
        object.__setattr__(self, "cluster_2", c2)

    @property
    def sites(self) -> np.ndarray:
        """All pointer sites, cluster 1 first."""
        return np.vstack([self.cluster_1, self.cluster_2])

    @property
    def n_per_cluster(self) -> int:
        return self.cluster_1.shape[0]

    def tau_g_s(self, constants: PhysConstants = CONSTANTS) -> float:
        return float(tau_g(self.mass, self.material_density, constants))


def footnote_pointer_config(
    mass_kg: float,
    n_per_cluster: int = 32,
    material_density: float = 1000.0,
    constants: PhysConstants = CONSTANTS,
) -> PointerConfig:
    """Two contiguous clusters of localized states at the localization width.

    Site spacing, cluster separation and profile width all equal the
    localization width of the pointer mass, i.e. each pointer state is a
    packet of that width and the M1 / M2 clusters sit side by side.
    """
    width = float(localization_width(mass_kg, constants))
    base = grid_cluster(n_per_cluster, width)
    span = base[:, 0].max() - base[:, 0].min()
    offset = np.array([span + width, 0.0, 0.0])
    return PointerConfig(
        mass=mass_kg,
        cluster_1=base,
        cluster_2=base + offset,
        profile=gaussian_cloud(mass_kg, width),
        material_density=material_density,
    )


@dataclass(frozen=True)
class Metastate2:
    """Amplitudes over (qubit, site) (x) (hidden qubit, hidden site)."""

    amps: np.ndarray   # complex, shape (2, n_sites, 2, n_sites)

    def __post_init__(self) -> None:
        a = np.asarray(self.amps, dtype=complex)
        if a.ndim != 4 or a.shape[0] != 2 or a.shape[2] != 2 or a.shape[1] != a.shape[3]:
            raise ValueError("amplitudes must have shape (2, n, 2, n)")
        object.__setattr__(self, "amps", a)

    @property
    def n_sites(self) -> int:
        return self.amps.shape[1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def swap_replicas(self) -> "Metastate2":
        return Metastate2(self.amps.transpose(2, 3, 0, 1).copy())


def _single_replica_amplitudes(case: str, cfg: PointerConfig) -> np.ndarray:
    """chi[s, a] for (1/sqrt 2)(|1 M1> + |e2 M2>), uniform over each cluster."""
    branch2 = _CASE_BRANCH2.get(case.lower())
    if branch2 is None:
        raise ValueError(f"protocol case must be 'a' or 'b', got {case!r}")
    nc = cfg.n_per_cluster
    chi = np.zeros((2, 2 * nc), dtype=complex)
    weight = 1.0 / math.sqrt(2.0 * nc)
    chi[:, :nc] += np.outer(KET_ONE, np.full(nc, weight))
    chi[:, nc:] += np.outer(branch2, np.full(nc, weight))
    return chi


def prepare(case: str, cfg: PointerConfig) -> Metastate2:
    """Symmetric product metastate for protocol case 'a' or 'b'."""
    chi = _single_replica_amplitudes(case, cfg)
    amps = np.einsum("sa,qb->saqb", chi, chi)
    return Metastate2(amps)


def _pair_phase_rates(cfg: PointerConfig, constants: PhysConstants) -> np.ndarray:
    """theta[a, b] / t between physical site a and hidden site b.

    Attractive pair Hamiltonian -G m^2 I(d_ab) with the two-replica
    coupling G/(N-1) = G, hence phase +G m^2 I(d_ab) t / hbar.
    """
    sites = cfg.sites
    dist = np.linalg.norm(sites[:, None, :] - sites[None, :, :], axis=-1)
    return constants.G * cfg.profile.mass**2 * pair_integral(cfg.profile, dist) / constants.hbar


def evolve(
    state: Metastate2,
    cfg: PointerConfig,
    t: float,
    coupling_scale: float = 1.0,
    constants: PhysConstants = CONSTANTS,
) -> Metastate2:
    """Unitary cross-replica evolution for a time t (qubits untouched)."""
    if t < 0.0:
        raise ValueError("time must be non-negative")
    if state.n_sites != cfg.sites.shape[0]:
        raise ValueError("state and config disagree on the number of pointer sites")
    theta = coupling_scale * _pair_phase_rates(cfg, constants) * t
    return Metastate2(state.amps * np.exp(1j * theta)[None, :, None, :])


@dataclass(frozen=True)
class QubitDensity:
    """Trace-one 2x2 density matrix in the {|1>, |0>} basis."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("qubit density must be 2x2")
        object.__setattr__(self, "matrix", m)


def reduced_qubit(state: Metastate2) -> QubitDensity:
    """Partial trace over the pointer and the whole hidden replica."""
    rho = np.einsum("saqb,taqb->st", state.amps, state.amps.conj())
    trace = np.trace(rho).real
    if trace <= 0.0:
        raise ValueError("state has zero norm")
    return QubitDensity(rho / trace)


def sigma3(rho: QubitDensity) -> float:
    """Pauli-z expectation C_11 - C_22 in the {|1>, |0>} basis."""
    value = rho.matrix[0, 0] - rho.matrix[1, 1]
    return float(value.real)


def _case_sigma3(case: str, cfg: PointerConfig, t: float, coupling_scale: float,
                 constants: PhysConstants) -> float:
    return sigma3(reduced_qubit(evolve(prepare(case, cfg), cfg, t, coupling_scale, constants)))


def everett_signal(
    cfg: PointerConfig,
    t: float,
    coupling_scale: float = 1.0,
    constants: PhysConstants = CONSTANTS,
) -> float:
    """|<sigma3>_b(t) - <sigma3>_a(t)| between the two protocol cases."""
    s_b = _case_sigma3("b", cfg, t, coupling_scale, constants)
    s_a = _case_sigma3("a", cfg, t, coupling_scale, constants)
    return abs(s_b - s_a)


def branch_coherence(state: Metastate2, cfg: PointerConfig, case: str = "b") -> float:
    """|<1 M1| rho_SM |e2 M2>|: the surviving inter-branch coherence.

    rho_SM is the physical qubit (x) pointer state with the hidden replica
    traced out. The value starts at 1/2 and decays when the hidden-pointer
    phases randomize; it is the quantity whose collapse closes the
    inter-branch channel.
    """
    branch2 = _CASE_BRANCH2.get(case.lower())
    if branch2 is None:
        raise ValueError(f"protocol case must be 'a' or 'b', got {case!r}")
    nc = cfg.n_per_cluster
    n = 2 * nc
    weight = 1.0 / math.sqrt(nc)
    v1 = np.zeros((2, n), dtype=complex)
    v1[:, :nc] = np.outer(KET_ONE, np.full(nc, weight))
    v2 = np.zeros((2, n), dtype=complex)
    v2[:, nc:] = np.outer(branch2, np.full(nc, weight))
    w1 = np.einsum("sa,saqb->qb", v1.conj(), state.amps)
    w2 = np.einsum("sa,saqb->qb", v2.conj(), state.amps)
    return float(abs(np.sum(w1 * w2.conj())))


@dataclass(frozen=True)
class SignalSweep:
    """Case expectations, signal and branch coherence on a time grid."""

    t: np.ndarray
    t_over_tau_g: np.ndarray
    sigma3_a: np.ndarray
    sigma3_b: np.ndarray
    signal: np.ndarray
    coherence_b: np.ndarray

    def write_csv(self, path) -> None:
        from .csvio import write_csv

        write_csv(
            path,
            ["t_s", "t_over_tau_g", "sigma3_A", "sigma3_B", "signal"],
            [self.t, self.t_over_tau_g, self.sigma3_a, self.sigma3_b, self.signal],
        )

    def write_coherence_csv(self, path) -> None:
        from .csvio import write_csv

        write_csv(path, ["t_s", "branch_coherence"], [self.t, self.coherence_b])


def signal_sweep(
    cfg: PointerConfig,
    t_grid,
    coupling_scale: float = 1.0,
    constants: PhysConstants = CONSTANTS,
) -> SignalSweep:
    t_arr = np.asarray(t_grid, dtype=float)
    if t_arr.size == 0:
        raise ValueError("empty time grid")
    state_a0 = prepare("a", cfg)
    state_b0 = prepare("b", cfg)
    s_a = np.empty(t_arr.size)
    s_b = np.empty(t_arr.size)
    coh = np.empty(t_arr.size)
    for i, t in enumerate(t_arr):
        ev_a = evolve(state_a0, cfg, float(t), coupling_scale, constants)
        ev_b = evolve(state_b0, cfg, float(t), coupling_scale, constants)
        s_a[i] = sigma3(reduced_qubit(ev_a))
        s_b[i] = sigma3(reduced_qubit(ev_b))
        coh[i] = branch_coherence(ev_b, cfg, "b")
    tau = cfg.tau_g_s(constants)
    return SignalSweep(t_arr.copy(), t_arr / tau, s_a, s_b, np.abs(s_b - s_a), coh)
