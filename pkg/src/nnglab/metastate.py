"""Two-branch N-replica metastate algebra.

A superposition sqrt(p)|x> + sqrt(q)|y> replicated over N copies expands
into a binomial family of symmetrized kets; the coefficient on the sector
with k copies at x is

    c_k = sqrt(C(N, k)) * p^(k/2) * q^((N-k)/2),

so the squared coefficients are the binomial pmf and the norm is 1 by the
binomial theorem. Coefficients are held in log space: C(1e4, 5e3) overflows
double precision long before N reaches the sizes of interest here.

Two independent construction routes are provided. `build_metastate` uses
the gammaln closed form for log C(N, k); `extend` maps the N-replica state
to the (N+1)-replica state through Pascal's rule applied to the input
state's own coefficients, which is the induction step that proves the
expansion. The two must agree entry-wise.

The Gaussian picture: for large N the k-weights concentrate around k = Np
with variance N*p*(1-p), so per-k weights approach a normal density in
alpha = k/N scaled by 1/N. `concentration_profile` tabulates both and their
sup-norm gap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = [
    "BranchWeights",
    "Metastate",
    "ConcentrationProfile",
    "build_metastate",
    "extend",
    "concentration_profile",
]

_WEIGHT_TOL = 1.0e-12


@dataclass(frozen=True)
class BranchWeights:
    """Branch probabilities p (at x) and q (at y), p + q = 1."""

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError(f"branch weights must lie in [0, 1], got p={self.p}, q={self.q}")
        if abs(self.p + self.q - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"branch weights must sum to 1, got p+q={self.p + self.q!r}")

    @classmethod
    def from_p(cls, p: float) -> "BranchWeights":
        return cls(float(p), 1.0 - float(p))

    def close_to(self, other: "BranchWeights", tol: float = _WEIGHT_TOL) -> bool:
        return abs(self.p - other.p) <= tol and abs(self.q - other.q) <= tol


@dataclass(frozen=True)
class Metastate:
    """Coefficient vector over k = number of replicas in the x branch.

    log_coeffs[k] = log c_k (=-inf where a degenerate weight kills the
    sector). coeffs exponentiates on read.
    """

    n_replicas: int
    weights: BranchWeights
    log_coeffs: np.ndarray

    @property
    def coeffs(self) -> np.ndarray:
        return np.exp(self.log_coeffs)

    def norm_sq(self) -> float:
        """Sum of squared coefficients, evaluated in log space."""
        finite = self.log_coeffs[np.isfinite(self.log_coeffs)]
        if finite.size == 0:
            return 0.0
        return float(np.exp(logsumexp(2.0 * finite)))


def _half_log_terms(weights: BranchWeights, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(k/2) log p and ((n-k)/2) log q for k = 0..n, with 0 * log 0 = 0."""
    k = np.arange(n + 1, dtype=float)
    with np.errstate(divide="ignore"):
        log_p = np.log(weights.p) if weights.p > 0.0 else -np.inf
        log_q = np.log(weights.q) if weights.q > 0.0 else -np.inf
    p_part = np.where(k > 0, 0.5 * k * log_p, 0.0)
    q_part = np.where(k < n, 0.5 * (n - k) * log_q, 0.0)
    return p_part, q_part


def build_metastate(weights: BranchWeights, n_replicas: int) -> Metastate:
    """Closed-form coefficients for N replicas via gammaln."""
    n = int(n_replicas)
    if n < 1:
        raise ValueError(f"replica count must be >= 1, got {n_replicas}")
    k = np.arange(n + 1, dtype=float)
    log_binom = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    p_part, q_part = _half_log_terms(weights, n)
    return Metastate(n, weights, 0.5 * log_binom + p_part + q_part)


def extend(state: Metastate, weights: BranchWeights) -> Metastate:
    """Append one replica: the N -> N+1 induction step.

    Recovers log C(N, k) from the input state's coefficients, combines
    adjacent sectors by Pascal's rule C(N,k) + C(N,k-1) = C(N+1,k), and
    reattaches the branch-weight factors for N+1. Must reproduce
    build_metastate(weights, N+1) entry-wise.
    """
    if not state.weights.close_to(weights):
        raise ValueError(
            f"weight mismatch: state built with p={state.weights.p}, extend called with p={weights.p}"
        )
    n = state.n_replicas
    if weights.p == 0.0 or weights.q == 0.0:
        # degenerate branch: the combinatorics are invisible in the (single
        # surviving) coefficient, so extend degenerately too
        return build_metastate(weights, n + 1)
    p_part, q_part = _half_log_terms(weights, n)
    log_binom_n = 2.0 * (state.log_coeffs - p_part - q_part)
    # Pascal in log space: rows k = 0..n+1, with C(N,-1) = C(N,N+1) = 0
    padded_hi = np.concatenate([log_binom_n, [-np.inf]])   # C(N, k)
    padded_lo = np.concatenate([[-np.inf], log_binom_n])   # C(N, k-1)
    log_binom_next = np.logaddexp(padded_hi, padded_lo)
    p_next, q_next = _half_log_terms(weights, n + 1)
    return Metastate(n + 1, weights, 0.5 * log_binom_next + p_next + q_next)


@dataclass(frozen=True)
class ConcentrationProfile:
    """Per-k weights against their large-N Gaussian approximation."""

    alpha: np.ndarray             # k / N
    binomial_weight: np.ndarray   # C(N,k) p^k q^(N-k)
    gaussian_weight: np.ndarray   # normal(alpha; p, p q / N) / N

    @property
    def sup_deviation(self) -> float:
        return float(np.max(np.abs(self.binomial_weight - self.gaussian_weight)))

    @property
    def peak_weight(self) -> float:
        return float(np.max(self.binomial_weight))

    def rows(self):
        return zip(self.alpha, self.binomial_weight, self.gaussian_weight)


def concentration_profile(weights: BranchWeights, n_replicas: int) -> ConcentrationProfile:
    """Tabulate binomial k-weights next to the Gaussian density in alpha = k/N."""
    n = int(n_replicas)
    if n < 2:
        raise ValueError(f"replica count must be >= 2, got {n_replicas}")
    p, q = weights.p, weights.q
    if p <= 0.0 or p >= 1.0:
        raise ValueError("degenerate weights have no Gaussian approximation")
    state = build_metastate(weights, n)
    alpha = np.arange(n + 1, dtype=float) / n
    binom = np.exp(2.0 * state.log_coeffs)
    var = p * q / n
    gauss = np.exp(-((alpha - p) ** 2) / (2.0 * var)) / np.sqrt(2.0 * np.pi * var) / n
    return ConcentrationProfile(alpha, binom, gauss)
