"""
Univariate Cauchy law and jointly Cauchy vectors defined by an atomic
spectral measure.
"""

import logging
from typing import Union

import numpy as np

from heavytail.core import rng
from heavytail.core.errors import DimensionMismatchError, ParameterOutOfRangeError
from heavytail.models import CauchyScale, SampleBatch, SpectralMeasure

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# smallest uniform handed to the quantile; keeps draws finite
_U_LOW = np.finfo(float).tiny


def _scale(sigma: Union[float, CauchyScale]) -> float:
    if isinstance(sigma, CauchyScale):
        return sigma.sigma
    return CauchyScale(float(sigma)).sigma


def cauchy_pdf(x: ArrayLike, sigma: Union[float, CauchyScale] = 1.0) -> ArrayLike:
    s = _scale(sigma)
    return s / (np.pi * (np.square(x) + s * s))


def cauchy_pdf_selfref(x: ArrayLike, sigma: Union[float, CauchyScale] = 1.0) -> ArrayLike:
    """Cauchy density written through its own value at the origin"""
    f0 = cauchy_pdf(0.0, sigma)
    return f0 / (np.pi ** 2 * f0 ** 2 * np.square(x) + 1.0)


def cauchy_cdf(x: ArrayLike, sigma: Union[float, CauchyScale] = 1.0) -> ArrayLike:
    return 0.5 + np.arctan(np.divide(x, _scale(sigma))) / np.pi


def cauchy_quantile(p: ArrayLike, sigma: Union[float, CauchyScale] = 1.0) -> ArrayLike:
    s = _scale(sigma)
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0.0) | (p >= 1.0)) or np.any(np.isnan(p)):
        raise ParameterOutOfRangeError("quantile probabilities must lie in (0, 1)")

    # cot form on the short side keeps full relative precision in both tails
    with np.errstate(divide="ignore"):
        q = np.where(p < 0.5, -s / np.tan(np.pi * p), s / np.tan(np.pi * (1.0 - p)))
    return q[()] if q.ndim == 0 else q


def draw_cauchy(generator: np.random.Generator, size, sigma: float = 1.0) -> np.ndarray:
    return cauchy_quantile(generator.uniform(_U_LOW, 1.0, size=size), sigma)


def sample_cauchy(count: int, sigma: Union[float, CauchyScale], seed: int) -> SampleBatch:
    s = _scale(sigma)
    values = rng.generate(count, seed, lambda generator, size: draw_cauchy(generator, size, s))
    return SampleBatch(values=values, seed=seed, meta={"kind": "cauchy", "sigma": s, "count": count})


def mv_cauchy_charfn(theta_vec, gamma: SpectralMeasure) -> ArrayLike:
    """
    exp(-sum_k gamma_k |<theta, s_k>|)

    theta_vec may be a single n-vector or an m x n array of probe points.
    """
    theta_vec = np.asarray(theta_vec, dtype=float)
    if theta_vec.shape[-1] != gamma.dim:
        raise DimensionMismatchError(f"theta has dimension {theta_vec.shape[-1]}, measure has {gamma.dim}")
    return np.exp(-np.abs(theta_vec @ gamma.directions.T) @ gamma.masses)


def sample_mv_cauchy(gamma: SpectralMeasure, count: int, seed: int) -> SampleBatch:
    """X = sum_k gamma_k W_k s_k with W_k iid standard Cauchy"""
    def draw(generator: np.random.Generator, size: int) -> np.ndarray:
        w = draw_cauchy(generator, (size, gamma.masses.size))
        return (w * gamma.masses) @ gamma.directions

    values = rng.generate(count, seed, draw)
    logger.info(f"Sampled {count} jointly Cauchy {gamma.dim}-vectors from {gamma.masses.size} atoms")
    return SampleBatch(
        values=values,
        seed=seed,
        meta={
            "kind": "mv_cauchy",
            "directions": gamma.directions.tolist(),
            "masses": gamma.masses.tolist(),
            "count": count,
        },
    )
