"""
Samplers for the three normal-to-Cauchy transformations.

- RatioPM:   sum_j w_j X_j / Y_j
- AbsRatio:  sum_j w_j X_j / |Y_j|
- StoppedBM: sum_j w_j X_j(Y_j^-2), each coordinate of a vector Brownian
  motion read at its own random time Y_j^-2

(X) and (Y) are iid centered Gaussian vectors sharing the covariance of the
given factor. The stopped Brownian motion has two constructions: an explicit
path built from independent increments, and a normal mixture conditional on
(Y_1, Y_2) for the two-coordinate theta-parametrization.
"""

import logging
from typing import Sequence, Union

import numpy as np

from heavytail.core import rng
from heavytail.core.errors import DimensionMismatchError, NotPositiveDefiniteError, ParameterOutOfRangeError
from heavytail.models import (
    CholeskyFactor,
    CovarianceMatrix,
    EmpiricalSample,
    SampleBatch,
    ThetaCovariance,
    TransformKind,
    Weights,
)
from heavytail.services.gauss import cholesky, draw_mvn, theta_to_covariance
from heavytail.services.stats import ks_two_sample

logger = logging.getLogger(__name__)

Covariance = Union[CovarianceMatrix, CholeskyFactor]


def _factor(sigma: Covariance) -> CholeskyFactor:
    return sigma if isinstance(sigma, CholeskyFactor) else cholesky(sigma)


def _check_dims(factor: CholeskyFactor, w: Weights) -> None:
    if factor.dim != len(w):
        raise DimensionMismatchError(f"covariance has dimension {factor.dim} but {len(w)} weights were given")


def _draw_denominators(generator: np.random.Generator, factor: CholeskyFactor, size: int) -> np.ndarray:
    """Gaussian rows with no exactly-zero coordinate"""
    y = draw_mvn(generator, factor, size)
    zero = np.any(y == 0.0, axis=1)
    while np.any(zero):
        logger.warning(f"Redrawing {int(zero.sum())} denominators that underflowed to zero")
        y[zero] = draw_mvn(generator, factor, int(zero.sum()))
        zero = np.any(y == 0.0, axis=1)
    return y


def _meta(kind: TransformKind, factor: CholeskyFactor, w: Weights, count: int, **extra) -> dict:
    return {
        "transform": kind.value,
        "covariance": factor.covariance().tolist(),
        "weights": list(w.values),
        "count": count,
        **extra,
    }


def _sample_ratio(kind: TransformKind, sigma: Covariance, w, count: int, seed: int) -> SampleBatch:
    factor, w = _factor(sigma), Weights.of(w)
    _check_dims(factor, w)
    weights = w.as_array()
    absolute = kind == TransformKind.ABS_RATIO

    def draw(generator: np.random.Generator, size: int) -> np.ndarray:
        x = draw_mvn(generator, factor, size)
        y = _draw_denominators(generator, factor, size)
        return (x / (np.abs(y) if absolute else y)) @ weights

    values = rng.generate(count, seed, draw)
    logger.info(f"Sampled {count} {kind.value} draws (seed={seed})")
    return SampleBatch(values=values, seed=seed, meta=_meta(kind, factor, w, count))


def sample_ratio_pm(sigma: Covariance, w: Union[Weights, Sequence[float]], count: int, seed: int) -> SampleBatch:
    return _sample_ratio(TransformKind.RATIO_PM, sigma, w, count, seed)


def sample_abs_ratio(sigma: Covariance, w: Union[Weights, Sequence[float]], count: int, seed: int) -> SampleBatch:
    return _sample_ratio(TransformKind.ABS_RATIO, sigma, w, count, seed)


def draw_stopped_path(generator: np.random.Generator, factor: CholeskyFactor, weights: np.ndarray, size: int) -> np.ndarray:
    n = factor.dim
    y = _draw_denominators(generator, factor, size)
    times = 1.0 / np.square(y)

    order = np.argsort(times, axis=1)
    sorted_times = np.take_along_axis(times, order, axis=1)
    steps = np.diff(sorted_times, axis=1, prepend=0.0)

    # row r of each path: full n-vector increment over [t_(r-1), t_(r)]
    increments = generator.standard_normal((size, n, n)) @ factor.entries.T
    path = np.cumsum(np.sqrt(steps)[:, :, None] * increments, axis=1)

    rank = np.argsort(order, axis=1)
    stopped = np.take_along_axis(path, rank[:, None, :], axis=1)[:, 0, :]
    return stopped @ weights


def sample_stopped_bm_path(sigma: Covariance, w: Union[Weights, Sequence[float]], count: int, seed: int) -> SampleBatch:
    factor, w = _factor(sigma), Weights.of(w)
    _check_dims(factor, w)
    weights = w.as_array()

    values = rng.generate(count, seed, lambda generator, size: draw_stopped_path(generator, factor, weights, size))
    logger.info(f"Sampled {count} stopped Brownian motion draws by path construction (seed={seed})")
    return SampleBatch(
        values=values,
        seed=seed,
        meta=_meta(TransformKind.STOPPED_BM, factor, w, count, method="path"),
    )


def mixture_variance(y1: np.ndarray, y2: np.ndarray, theta: float, w1: float, w2: float) -> np.ndarray:
    """Conditional variance of w1 X1(y1^-2) + w2 X2(y2^-2) given (y1, y2)"""
    d = 1.0 - theta ** 2
    y1sq, y2sq = np.square(y1), np.square(y2)
    return w1 ** 2 / (y1sq * d) - 2.0 * w1 * w2 * theta / (np.maximum(y1sq, y2sq) * d) + w2 ** 2 / (y2sq * d)


def sample_stopped_bm_mixture(
    theta: Union[float, ThetaCovariance],
    w: Union[Weights, Sequence[float]],
    count: int,
    seed: int,
) -> SampleBatch:
    theta = theta if isinstance(theta, ThetaCovariance) else ThetaCovariance(float(theta))
    w = Weights.of(w)
    if len(w) != 2:
        raise DimensionMismatchError(f"the mixture sampler is defined for two coordinates, got {len(w)} weights")
    factor = cholesky(theta_to_covariance(theta))
    w1, w2 = w.values

    def draw(generator: np.random.Generator, size: int) -> np.ndarray:
        y = _draw_denominators(generator, factor, size)
        variance = mixture_variance(y[:, 0], y[:, 1], theta.theta, w1, w2)
        if np.any(variance <= 0):
            raise NotPositiveDefiniteError(f"mixture variance is not positive for {int(np.sum(variance <= 0))} draws")
        return np.sqrt(variance) * generator.standard_normal(size)

    values = rng.generate(count, seed, draw)
    logger.info(f"Sampled {count} stopped Brownian motion draws by normal mixture (seed={seed})")
    return SampleBatch(
        values=values,
        seed=seed,
        meta=_meta(TransformKind.STOPPED_BM, factor, w, count, method="mixture", theta=theta.theta),
    )


def bm_selfsimilarity_check(
    sigma: Covariance,
    c: float,
    count: int,
    seed: int,
    alpha: float = 0.01,
    probe_time: float = 1.0,
    steps: int = 16,
) -> bool:
    """
    Compare X(c t0), built from `steps` independent increments, with
    c^(1/2) X(t0) drawn directly; per-coordinate two-sample KS must pass.
    """
    if not c > 0:
        raise ParameterOutOfRangeError(f"scale factor c must be positive, got {c}")
    factor = _factor(sigma)
    dt = c * probe_time / steps

    def draw_path_end(generator: np.random.Generator, size: int) -> np.ndarray:
        increments = generator.standard_normal((size, steps, factor.dim)) @ factor.entries.T
        return np.sqrt(dt) * increments.sum(axis=1)

    def draw_scaled(generator: np.random.Generator, size: int) -> np.ndarray:
        return np.sqrt(c) * np.sqrt(probe_time) * draw_mvn(generator, factor, size)

    stretched = rng.generate(count, seed, draw_path_end, stream=0)
    scaled = rng.generate(count, seed, draw_scaled, stream=1)

    results = [
        ks_two_sample(EmpiricalSample.from_values(stretched[:, j]), EmpiricalSample.from_values(scaled[:, j]), alpha)
        for j in range(factor.dim)
    ]
    for j, result in enumerate(results):
        logger.debug(f"Self-similarity coordinate {j}: D={result.statistic:.3e}, critical={result.critical_value:.3e}")
    return all(result.passes for result in results)
