"""Replica metastate algebra against an arbitrary-precision oracle."""

import math

import mpmath
import numpy as np
import pytest

from nnglab.metastate import BranchWeights, build_metastate, concentration_profile, extend


def exact_coeffs(p: float, n: int) -> np.ndarray:
    """sqrt(C(n,k) p^k q^(n-k)) at 60 significant digits."""
    with mpmath.workdps(60):
        pp = mpmath.mpf(repr(p))
        qq = 1 - pp
        vals = [
            mpmath.sqrt(mpmath.binomial(n, k) * pp**k * qq ** (n - k))
            for k in range(n + 1)
        ]
        return np.array([float(v) for v in vals])


class TestBuild:
    def test_single_branch_degeneracy(self):
        state = build_metastate(BranchWeights(1.0, 0.0), 5)
        assert np.allclose(state.coeffs, [0, 0, 0, 0, 0, 1], atol=0)

    def test_half_half_two_replicas(self):
        state = build_metastate(BranchWeights.from_p(0.5), 2)
        expected = np.array([0.5, 1.0 / math.sqrt(2.0), 0.5])
        np.testing.assert_allclose(state.coeffs, expected, rtol=1e-14)

    def test_against_high_precision_oracle(self):
        state = build_metastate(BranchWeights.from_p(0.3), 12)
        np.testing.assert_allclose(state.coeffs, exact_coeffs(0.3, 12), atol=1e-14)

    def test_coeffs_nonnegative(self):
        state = build_metastate(BranchWeights.from_p(0.123), 50)
        assert np.all(state.coeffs >= 0.0)

    def test_rejects_zero_replicas(self):
        with pytest.raises(ValueError):
            build_metastate(BranchWeights.from_p(0.5), 0)

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            BranchWeights(0.7, 0.7)
        with pytest.raises(ValueError):
            BranchWeights(-0.1, 1.1)

    @pytest.mark.parametrize("n", [1, 2, 5, 10, 100, 1000, 10000])
    def test_normalization(self, n):
        state = build_metastate(BranchWeights.from_p(0.3), n)
        assert abs(state.norm_sq() - 1.0) < 1.0e-8


class TestExtend:
    def test_base_induction_step(self):
        grown = extend(build_metastate(BranchWeights.from_p(0.5), 1), BranchWeights.from_p(0.5))
        direct = build_metastate(BranchWeights.from_p(0.5), 2)
        np.testing.assert_allclose(grown.coeffs, direct.coeffs, atol=1e-14)

    def test_eleven_to_twelve_against_oracle(self):
        grown = extend(build_metastate(BranchWeights.from_p(0.3), 11), BranchWeights.from_p(0.3))
        np.testing.assert_allclose(grown.coeffs, exact_coeffs(0.3, 12), atol=1e-12)

    def test_permutation_count_bookkeeping(self):
        # the sector merge adds the two permutation families
        assert math.comb(11, 4) + math.comb(11, 3) == math.comb(12, 4)

    def test_identity_many_weights(self):
        rng = np.random.default_rng(1234)
        for p in rng.uniform(0.01, 0.99, size=50):
            weights = BranchWeights.from_p(float(p))
            for n in range(1, 21):
                grown = extend(build_metastate(weights, n), weights)
                direct = build_metastate(weights, n + 1)
                assert np.max(np.abs(grown.coeffs - direct.coeffs)) < 1.0e-12

    def test_weight_mismatch_rejected(self):
        state = build_metastate(BranchWeights.from_p(0.3), 4)
        with pytest.raises(ValueError, match="mismatch"):
            extend(state, BranchWeights.from_p(0.4))


class TestConcentration:
    def test_gaussian_matches_binomial_at_large_n(self):
        profile = concentration_profile(BranchWeights.from_p(0.5), 10**4)
        assert profile.sup_deviation < 1.0e-2 * profile.peak_weight

    def test_symmetric_at_half(self):
        profile = concentration_profile(BranchWeights.from_p(0.5), 400)
        np.testing.assert_allclose(
            profile.binomial_weight, profile.binomial_weight[::-1], atol=1e-15
        )

    def test_width_shrinks_with_sqrt_n(self):
        def width(n):
            prof = concentration_profile(BranchWeights.from_p(0.3), n)
            w = prof.binomial_weight / prof.binomial_weight.sum()
            mean = np.sum(w * prof.alpha)
            return math.sqrt(np.sum(w * (prof.alpha - mean) ** 2))

        ratio = width(500) / width(5000)
        assert abs(ratio - math.sqrt(10.0)) < 0.05 * math.sqrt(10.0)

    @pytest.mark.parametrize("n", [1000, 10000])
    def test_tail_mass_outside_five_sigma(self, n):
        p = 0.3
        state = build_metastate(BranchWeights.from_p(p), n)
        weights = np.exp(2.0 * state.log_coeffs)
        alpha = np.arange(n + 1) / n
        sigma = math.sqrt(p * (1 - p) / n)
        outside = weights[np.abs(alpha - p) > 5.0 * sigma].sum()
        assert outside < 1.0e-5

    def test_degenerate_weights_rejected(self):
        with pytest.raises(ValueError):
            concentration_profile(BranchWeights(1.0, 0.0), 100)
        with pytest.raises(ValueError):
            concentration_profile(BranchWeights.from_p(0.5), 1)
