"""
Covariance handling and multivariate normal sampling.

Covers the two-coordinate theta-parametrization (inverse covariance
[[1, theta], [theta, 1]]), Cholesky factorization with a pivot tolerance,
the rank-one factor of a perfectly correlated vector, and seeded batched
sampling of centered Gaussian vectors.
"""

import logging
from typing import Sequence, Union

import numpy as np

from heavytail.core import rng
from heavytail.core.errors import NotPositiveDefiniteError, ParameterOutOfRangeError
from heavytail.models import CholeskyFactor, CovarianceMatrix, SampleBatch, ThetaCovariance

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-12


def theta_to_covariance(theta: Union[float, ThetaCovariance]) -> CovarianceMatrix:
    """Covariance (1/(1-theta^2)) [[1, -theta], [-theta, 1]]"""
    if not isinstance(theta, ThetaCovariance):
        theta = ThetaCovariance(float(theta))
    return CovarianceMatrix(theta.matrix)


def cholesky(sigma: CovarianceMatrix) -> CholeskyFactor:
    entries = sigma.entries
    try:
        factor = np.linalg.cholesky(entries)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"covariance is not positive definite: {e}")

    pivots = np.diag(factor) ** 2
    threshold = PIVOT_TOL * np.max(np.diag(entries))
    if np.any(pivots <= threshold):
        index = int(np.argmin(pivots))
        raise NotPositiveDefiniteError(
            f"pivot {index} is {pivots[index]:.3e}, not above {threshold:.3e}"
        )
    return CholeskyFactor(factor)


def perfectly_correlated_factor(std_devs: Sequence[float]) -> CholeskyFactor:
    """Rank-one factor: every implied correlation equals 1"""
    std_devs = np.asarray(std_devs, dtype=float)
    if std_devs.ndim != 1 or std_devs.size == 0 or np.any(std_devs <= 0):
        raise ParameterOutOfRangeError("standard deviations must be a non-empty vector of positive values")
    entries = np.zeros((std_devs.size, std_devs.size))
    entries[:, 0] = std_devs
    return CholeskyFactor(entries, degenerate=True)


def correlation_from_covariance(sigma: CovarianceMatrix) -> np.ndarray:
    scale = 1.0 / np.sqrt(np.diag(sigma.entries))
    return sigma.entries * np.outer(scale, scale)


def draw_mvn(generator: np.random.Generator, factor: CholeskyFactor, size: int) -> np.ndarray:
    """size x n centered Gaussian rows with covariance L L^T"""
    return generator.standard_normal((size, factor.dim)) @ factor.entries.T


def sample_mvn(factor: CholeskyFactor, count: int, seed: int) -> SampleBatch:
    values = rng.generate(count, seed, lambda generator, size: draw_mvn(generator, factor, size))
    logger.info(f"Sampled {count} Gaussian {factor.dim}-vectors (seed={seed})")
    return SampleBatch(
        values=values,
        seed=seed,
        meta={"kind": "mvn", "covariance": factor.covariance().tolist(), "count": count},
    )
