import math

import numpy as np
import pytest

from heavytail.core.errors import DimensionMismatchError, ParameterOutOfRangeError
from heavytail.models import CovarianceMatrix, TransformKind, Weights
from heavytail.services import cauchy, gauss, stats, transforms

SAMPLERS = {
    TransformKind.RATIO_PM: transforms.sample_ratio_pm,
    TransformKind.ABS_RATIO: transforms.sample_abs_ratio,
    TransformKind.STOPPED_BM: transforms.sample_stopped_bm_path,
}


def passes_cauchy_ks(values, alpha=0.01):
    return stats.ks_one_sample(values, cauchy.cauchy_cdf, alpha).passes


class TestWeights:
    def test_parse(self):
        assert Weights.parse("0.3,0.7").values == (0.3, 0.7)

    @pytest.mark.parametrize("text", ["0.3,0.6", "1.2,-0.2", "a,b", ""])
    def test_parse_rejects(self, text):
        with pytest.raises(ParameterOutOfRangeError):
            Weights.parse(text)

    def test_sum_tolerance(self):
        Weights((0.1, 0.2, 0.7))


class TestUnivariate:
    """n = 1: X/Y, X/|Y| and X(Y^-2) are all standard Cauchy"""

    @pytest.mark.parametrize("kind", list(TransformKind))
    def test_single_coordinate(self, kind, seed):
        batch = SAMPLERS[kind](CovarianceMatrix(np.eye(1)), [1.0], 200_000, seed)
        assert passes_cauchy_ks(batch.values)


class TestDiagonalCovariance:
    @pytest.mark.parametrize("kind", list(TransformKind))
    @pytest.mark.parametrize("w", [(0.5, 0.5), (0.3, 0.7), (1.0, 0.0)])
    def test_cauchy(self, kind, w, seed):
        batch = SAMPLERS[kind](gauss.theta_to_covariance(0.0), w, 200_000, seed)
        assert passes_cauchy_ks(batch.values)

    def test_three_coordinates_unequal_variances(self, seed):
        sigma = CovarianceMatrix(np.diag([1.0, 4.0, 0.25]))
        batch = transforms.sample_abs_ratio(sigma, (0.2, 0.3, 0.5), 200_000, seed)
        assert passes_cauchy_ks(batch.values)


class TestPerfectlyCorrelated:
    @pytest.mark.parametrize("kind", [TransformKind.RATIO_PM, TransformKind.ABS_RATIO])
    def test_ratios_cauchy_for_any_scales(self, kind, seed):
        factor = gauss.perfectly_correlated_factor([1.0, 2.0])
        batch = SAMPLERS[kind](factor, (0.4, 0.6), 200_000, seed)
        assert passes_cauchy_ks(batch.values)

    def test_stopped_bm_equal_scales(self, seed):
        factor = gauss.perfectly_correlated_factor([1.5, 1.5])
        batch = transforms.sample_stopped_bm_path(factor, (0.4, 0.6), 200_000, seed)
        assert passes_cauchy_ks(batch.values)

    def test_stopped_bm_unequal_scales_shrinks(self, seed):
        # one Brownian path read at two time scales: Cauchy with scale
        # sqrt(w1^2 + w2^2 + w1 w2) for standard deviations (1, 2)
        factor = gauss.perfectly_correlated_factor([1.0, 2.0])
        batch = transforms.sample_stopped_bm_path(factor, (0.5, 0.5), 200_000, seed)
        scale = math.sqrt(0.75)
        assert stats.ks_one_sample(batch.values, lambda x: cauchy.cauchy_cdf(x, scale), 0.01).passes
        assert not passes_cauchy_ks(batch.values, alpha=0.001)


class TestRatioPM:
    @pytest.mark.parametrize("theta", [-0.9, 0.5, 0.9])
    @pytest.mark.parametrize("w", [(0.5, 0.5), (0.3, 0.7)])
    def test_cauchy_for_every_covariance(self, theta, w, seed):
        batch = transforms.sample_ratio_pm(gauss.theta_to_covariance(theta), w, 1_000_000, seed)
        assert passes_cauchy_ks(batch.values)

    def test_reproducible(self, seed):
        sigma = gauss.theta_to_covariance(0.5)
        first = transforms.sample_ratio_pm(sigma, (0.3, 0.7), 1000, seed)
        second = transforms.sample_ratio_pm(sigma, (0.3, 0.7), 1000, seed)
        np.testing.assert_array_equal(first.values, second.values)
        assert first.meta["transform"] == "pm"

    def test_dimension_mismatch(self, seed):
        with pytest.raises(DimensionMismatchError):
            transforms.sample_ratio_pm(gauss.theta_to_covariance(0.5), (0.2, 0.3, 0.5), 10, seed)


class TestAbsRatio:
    def test_excess_density_at_origin(self, seed):
        batch = transforms.sample_abs_ratio(gauss.theta_to_covariance(0.5), (0.5, 0.5), 1_000_000, seed)
        hist = stats.histogram_density(batch.values, 0.05, (-0.025, 0.025))
        assert hist.density[0] - 1 / math.pi > 3 * hist.standard_error[0]


class TestStoppedBM:
    def test_path_matches_mixture(self, seed):
        sigma = gauss.theta_to_covariance(0.5)
        path = transforms.sample_stopped_bm_path(sigma, (0.5, 0.5), 1_000_000, seed)
        mixture = transforms.sample_stopped_bm_mixture(0.5, (0.5, 0.5), 1_000_000, seed + 1)
        assert stats.ks_two_sample(path.values, mixture.values, 0.01).passes

    def test_mixture_independent_case(self, seed):
        batch = transforms.sample_stopped_bm_mixture(0.0, (0.3, 0.7), 500_000, seed)
        assert passes_cauchy_ks(batch.values)

    def test_mixture_variance_reduces_at_theta_zero(self):
        y1, y2 = np.array([0.5, 2.0]), np.array([1.5, 0.1])
        expected = 0.3 ** 2 / y1 ** 2 + 0.7 ** 2 / y2 ** 2
        np.testing.assert_allclose(transforms.mixture_variance(y1, y2, 0.0, 0.3, 0.7), expected, rtol=1e-15)

    def test_mixture_variance_positive(self):
        rng = np.random.default_rng(3)
        y = rng.standard_normal((10_000, 2))
        for theta in (-0.9, 0.5, 0.99):
            assert np.all(transforms.mixture_variance(y[:, 0], y[:, 1], theta, 0.5, 0.5) > 0)

    def test_mixture_needs_two_weights(self, seed):
        with pytest.raises(DimensionMismatchError):
            transforms.sample_stopped_bm_mixture(0.5, (0.2, 0.3, 0.5), 10, seed)

    def test_theta_out_of_range(self, seed):
        with pytest.raises(ParameterOutOfRangeError):
            transforms.sample_stopped_bm_mixture(1.0, (0.5, 0.5), 10, seed)

    def test_strong_correlation_not_cauchy(self, seed):
        batch = transforms.sample_stopped_bm_path(gauss.theta_to_covariance(0.9), (0.5, 0.5), 1_000_000, seed)
        assert not passes_cauchy_ks(batch.values, alpha=0.001)


class TestSelfSimilarity:
    def test_unit_scale(self, seed):
        assert transforms.bm_selfsimilarity_check(CovarianceMatrix(np.eye(1)), 1.0, 200_000, seed)

    def test_scale_four(self, seed):
        assert transforms.bm_selfsimilarity_check(CovarianceMatrix(np.eye(1)), 4.0, 200_000, seed)

    def test_correlated(self, seed):
        assert transforms.bm_selfsimilarity_check(gauss.theta_to_covariance(0.5), 2.5, 200_000, seed)

    def test_rejects_scale(self, seed):
        with pytest.raises(ParameterOutOfRangeError):
            transforms.bm_selfsimilarity_check(CovarianceMatrix(np.eye(1)), 0.0, 10, seed)


class TestSignSymmetry:
    """V and -V share a law; the negated batch comes from an independent seed"""

    @pytest.mark.parametrize("kind", list(TransformKind))
    @pytest.mark.parametrize("theta", [-0.5, 0.5])
    def test_symmetric(self, kind, theta, seed):
        sigma = gauss.theta_to_covariance(theta)
        batch = SAMPLERS[kind](sigma, (0.3, 0.7), 200_000, seed)
        mirrored = SAMPLERS[kind](sigma, (0.3, 0.7), 200_000, seed + 1)
        assert stats.ks_two_sample(batch.values, -mirrored.values, 0.01).passes

    def test_mixture_symmetric(self, seed):
        batch = transforms.sample_stopped_bm_mixture(0.5, (0.3, 0.7), 200_000, seed)
        mirrored = transforms.sample_stopped_bm_mixture(0.5, (0.3, 0.7), 200_000, seed + 1)
        assert stats.ks_two_sample(batch.values, -mirrored.values, 0.01).passes
