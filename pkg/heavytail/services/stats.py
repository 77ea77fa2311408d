"""
Empirical-distribution machinery: ECDF, one- and two-sample
Kolmogorov-Smirnov tests with asymptotic critical values, fixed-bin
histogram densities and empirical characteristic functions.
"""

import logging
from typing import Callable, Tuple

import numpy as np
from scipy import stats

from heavytail.core.errors import DimensionMismatchError, EmptySampleError, ParameterOutOfRangeError
from heavytail.models import EmpiricalSample, HistogramDensity, KSResult

logger = logging.getLogger(__name__)

SUPPORTED_ALPHAS = (0.05, 0.01, 0.001)


def _sample(sample) -> EmpiricalSample:
    return sample if isinstance(sample, EmpiricalSample) else EmpiricalSample.from_values(sample)


def _kolmogorov_quantile(alpha: float) -> float:
    if alpha not in SUPPORTED_ALPHAS:
        raise ParameterOutOfRangeError(f"alpha must be one of {SUPPORTED_ALPHAS}, got {alpha}")
    return float(stats.kstwobign.isf(alpha))


def ecdf(sample, x) -> np.ndarray:
    sample = _sample(sample)
    return np.searchsorted(sample.sorted_values, x, side="right") / sample.count


def ks_one_sample(sample, cdf: Callable[[np.ndarray], np.ndarray], alpha: float = 0.01) -> KSResult:
    sample = _sample(sample)
    c_alpha = _kolmogorov_quantile(alpha)
    statistic = stats.ks_1samp(sample.sorted_values, cdf, method="asymp").statistic
    return KSResult(
        statistic=float(statistic),
        critical_value=c_alpha / np.sqrt(sample.count),
        alpha=alpha,
    )


def ks_two_sample(a, b, alpha: float = 0.01) -> KSResult:
    a, b = _sample(a), _sample(b)
    c_alpha = _kolmogorov_quantile(alpha)
    statistic = stats.ks_2samp(a.sorted_values, b.sorted_values, method="asymp").statistic
    n, m = a.count, b.count
    return KSResult(
        statistic=float(statistic),
        critical_value=c_alpha / np.sqrt(n * m / (n + m)),
        alpha=alpha,
    )


def histogram_density(sample, bin_width: float, value_range: Tuple[float, float]) -> HistogramDensity:
    """
    Fixed-width histogram over value_range, normalized by the full sample size.

    Observations outside the range still count towards n, so each bin
    estimates the true density rather than a conditional one.
    """
    if not bin_width > 0:
        raise ParameterOutOfRangeError(f"bin width must be positive, got {bin_width}")
    low, high = value_range
    if not high > low:
        raise ParameterOutOfRangeError(f"empty histogram range [{low}, {high}]")
    values = np.asarray(sample.sorted_values if isinstance(sample, EmpiricalSample) else sample, dtype=float).ravel()
    if values.size == 0:
        raise EmptySampleError("histogram needs at least one observation")

    bins = max(1, int(round((high - low) / bin_width)))
    edges = low + bin_width * np.arange(bins + 1)
    counts, _ = np.histogram(values, bins=edges)

    n = values.size
    p = counts / n
    return HistogramDensity(
        centers=0.5 * (edges[:-1] + edges[1:]),
        density=p / bin_width,
        standard_error=np.sqrt(p * (1.0 - p) / n) / bin_width,
        bin_width=bin_width,
    )


def empirical_charfn(samples: np.ndarray, theta_vec) -> Tuple[float, float]:
    """Mean of cos<theta, X> over the rows of samples, with its Monte Carlo standard error"""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    theta_vec = np.asarray(theta_vec, dtype=float)
    if samples.shape[1] != theta_vec.shape[-1]:
        raise DimensionMismatchError(f"samples have dimension {samples.shape[1]}, theta has {theta_vec.shape[-1]}")
    if samples.shape[0] == 0:
        raise EmptySampleError("empirical characteristic function needs at least one observation")
    cosines = np.cos(samples @ theta_vec)
    return float(cosines.mean()), float(cosines.std(ddof=1) / np.sqrt(cosines.size)) if cosines.size > 1 else 0.0
