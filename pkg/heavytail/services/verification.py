"""
Acceptance suites for the `verify` subcommand.

Features:
- Ten acceptance criteria covering the Cauchy identity, the ratio transform,
  the diagonal case, non-Cauchy detection, derivatives, tail limits,
  normalization, sampler/density agreement, the two stopped Brownian motion
  samplers and jointly Cauchy vectors
- `quick` suite with reduced Monte Carlo sizes, `full` suite at full size
  including the 10^7-draw histogram comparison
- Pinned seeds so that a verdict is deterministic for a given build; a KS
  check that fails at its seed is re-run once at a second pinned seed
- Per-criterion timing and a JSON-serializable failure report
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from heavytail.core.config import PINNED_SEED, settings
from heavytail.core.errors import HeavyTailError
from heavytail.models import DensityModel, KSResult, SpectralMeasure, TransformKind
from heavytail.services import cauchy, density, gauss, stats, transforms

logger = logging.getLogger(__name__)

# Seed blocks, offset from PINNED_SEED, one per sampling criterion
SEED_BLOCKS = {
    "ratio_transform": 0,
    "diagonal_case": 100,
    "histogram_agreement": 200,
    "bm_cross_oracle": 300,
    "multivariate_cauchy": 400,
}
# Confirmation draws live far above every block
CONFIRMATION_OFFSET = 100_000

THETA_GRID = (-0.9, -0.5, -0.1, 0.1, 0.5, 0.9)
WEIGHT_GRID = ((0.5, 0.5), (0.3, 0.7), (0.9, 0.1))
CROSS_ORACLE_THETAS = (-0.5, 0.5, 0.9)
TAIL_THETAS = (0.0, 0.25, 0.5, 0.75)
DETECTION_THETAS = (0.05, 0.1, 0.2)
NORMALIZATION_GRID = (
    (TransformKind.ABS_RATIO, 0.0, (0.5, 0.5)),
    (TransformKind.ABS_RATIO, 0.5, (0.3, 0.7)),
    (TransformKind.ABS_RATIO, -0.5, (0.5, 0.5)),
    (TransformKind.STOPPED_BM, 0.0, (0.5, 0.5)),
    (TransformKind.STOPPED_BM, 0.5, (0.3, 0.7)),
    (TransformKind.STOPPED_BM, -0.5, (0.5, 0.5)),
)
# Histogram models; seeds follow list order within the block
HISTOGRAM_GRID = (
    (TransformKind.ABS_RATIO, 0.5, (0.3, 0.7)),
    (TransformKind.STOPPED_BM, 0.5, (0.5, 0.5)),
    (TransformKind.ABS_RATIO, -0.5, (0.5, 0.5)),
    (TransformKind.ABS_RATIO, 0.25, (0.9, 0.1)),
    (TransformKind.STOPPED_BM, -0.5, (0.3, 0.7)),
    (TransformKind.STOPPED_BM, 0.25, (0.9, 0.1)),
)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    elapsed_seconds: float
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None


class VerificationReport:
    """Collect criterion outcomes for one suite run"""

    def __init__(self, suite: str):
        self.suite = suite
        self.started = datetime.now()
        self.results: List[CriterionResult] = []

    def record(self, result: CriterionResult):
        self.results.append(result)
        status = "passed" if result.passed else "FAILED"
        logger.info(f"Criterion {result.name} {status} in {result.elapsed_seconds:.1f}s")

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def failures(self) -> List[Dict[str, Any]]:
        return [asdict(result) for result in self.results if not result.passed]

    def get_status(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "started": self.started.isoformat(),
            "passed": self.passed,
            "criteria": [asdict(result) for result in self.results],
        }


def _sizes(full: bool) -> Dict[str, int]:
    if full:
        return {"ks": 1_000_000, "histogram": 10_000_000}
    return {"ks": 100_000, "histogram": 0}


def _seed(criterion: str, offset: int = 0) -> int:
    return PINNED_SEED + SEED_BLOCKS[criterion] + offset


def _confirmed(test: Callable[[int], KSResult], seed: int) -> Dict[str, Any]:
    """
    KS verdict at a pinned seed.

    A failure is re-tested once at seed + CONFIRMATION_OFFSET, and the check
    then passes only if that replicate passes.
    """
    result = test(seed)
    row = {"seed": seed, "statistic": result.statistic, "critical": result.critical_value, "passes": result.passes}
    if result.passes:
        return row

    retry_seed = seed + CONFIRMATION_OFFSET
    retry = test(retry_seed)
    logger.warning(
        f"KS statistic {result.statistic:.6g} >= {result.critical_value:.6g} at seed {seed}; "
        f"confirmation at seed {retry_seed}: {retry.statistic:.6g}"
    )
    row.update({
        "confirmation_seed": retry_seed,
        "confirmation_statistic": retry.statistic,
        "passes": retry.passes,
    })
    return row


def _ks_cauchy(draw: Callable[[int], np.ndarray], seed: int) -> Dict[str, Any]:
    return _confirmed(lambda s: stats.ks_one_sample(draw(s), cauchy.cauchy_cdf, settings.KS_ALPHA), seed)


def check_cauchy_identity(full: bool) -> Tuple[bool, Dict[str, Any]]:
    x = np.linspace(-100.0, 100.0, 3334)
    deviation = max(
        float(np.max(np.abs(cauchy.cauchy_pdf(x, s) - cauchy.cauchy_pdf_selfref(x, s))))
        for s in (0.1, 1.0, 10.0)
    )
    return deviation < 1e-12, {"max_deviation": deviation}


def check_ratio_transform(full: bool) -> Tuple[bool, Dict[str, Any]]:
    count = _sizes(full)["ks"]
    rows = []
    for i, theta in enumerate(THETA_GRID):
        sigma = gauss.theta_to_covariance(theta)
        for j, w in enumerate(WEIGHT_GRID):
            row = _ks_cauchy(
                lambda s: transforms.sample_ratio_pm(sigma, w, count, s).values,
                _seed("ratio_transform", 10 * i + j),
            )
            rows.append({"theta": theta, "w": w, **row})
    return all(row["passes"] for row in rows), {"count": count, "cases": rows}


def check_diagonal_case(full: bool) -> Tuple[bool, Dict[str, Any]]:
    count = _sizes(full)["ks"]
    w = (0.3, 0.7)
    v = np.linspace(-5.0, 5.0, 41)
    exact = cauchy.cauchy_pdf(v)
    density_error = 0.0
    for kind in (TransformKind.ABS_RATIO, TransformKind.STOPPED_BM):
        model = DensityModel(kind=kind, theta=0.0, w=w)
        values = np.array([density.evaluate_density(model, x).value for x in v])
        density_error = max(density_error, float(np.max(np.abs(values - exact))))

    identity = gauss.theta_to_covariance(0.0)
    samplers = {
        "pm": transforms.sample_ratio_pm,
        "abs": transforms.sample_abs_ratio,
        "bm": transforms.sample_stopped_bm_path,
    }
    ks = {
        name: _ks_cauchy(lambda s, sampler=sampler: sampler(identity, w, count, s).values, _seed("diagonal_case", offset))
        for offset, (name, sampler) in enumerate(samplers.items())
    }

    passed = density_error < 1e-8 and all(entry["passes"] for entry in ks.values())
    return passed, {"max_density_error": density_error, "ks": ks}


def check_non_cauchy_detection(full: bool) -> Tuple[bool, Dict[str, Any]]:
    rows = []
    for kind in (TransformKind.ABS_RATIO, TransformKind.STOPPED_BM):
        for theta in DETECTION_THETAS:
            model = DensityModel(kind=kind, theta=theta, w=(0.5, 0.5))
            deviation = density.gv_zero(model).value - density.INV_PI
            rows.append({"kind": kind.value, "theta": theta, "deviation": deviation, "passes": deviation > 1e-4})
    return all(row["passes"] for row in rows), {"cases": rows}


def check_derivatives(full: bool) -> Tuple[bool, Dict[str, Any]]:
    expected = {TransformKind.ABS_RATIO: 0.125, TransformKind.STOPPED_BM: 1.0 / (4.0 * math.pi)}
    rows = []
    for kind, target in expected.items():
        quadrature = density.dgv0_dtheta_at_zero(kind, (0.5, 0.5))
        difference = density.finite_difference_derivative(kind, (0.5, 0.5), 1e-4)
        rows.append({
            "kind": kind.value,
            "quadrature": quadrature,
            "finite_difference": difference,
            "passes": abs(quadrature - target) < 1e-8 and abs(difference - quadrature) < 1e-5,
        })
    return all(row["passes"] for row in rows), {"cases": rows}


def check_tail_limit(full: bool) -> Tuple[bool, Dict[str, Any]]:
    rows = []
    for kind in (TransformKind.ABS_RATIO, TransformKind.STOPPED_BM):
        for theta in TAIL_THETAS:
            model = DensityModel(kind=kind, theta=theta, w=(0.5, 0.5))
            near = abs(density.tail_functional(model, 1e4) - density.INV_PI)
            far = abs(density.tail_functional(model, 1e5) - density.INV_PI)
            rows.append({
                "kind": kind.value, "theta": theta,
                "gap_1e4": near, "gap_1e5": far,
                "passes": near < 1e-3 and far < 1e-4,
            })
    return all(row["passes"] for row in rows), {"cases": rows}


def check_normalization(full: bool) -> Tuple[bool, Dict[str, Any]]:
    rows = []
    for kind, theta, w in NORMALIZATION_GRID:
        total = density.normalization_check(DensityModel(kind=kind, theta=theta, w=w))
        rows.append({"kind": kind.value, "theta": theta, "w": w, "integral": total, "passes": abs(total - 1.0) < 1e-6})
    return all(row["passes"] for row in rows), {"cases": rows}


def histogram_z_scores(values: np.ndarray, model: DensityModel) -> np.ndarray:
    """|histogram - g_V| / binomial SE on every fifth 0.05-wide bin of [-5, 5]"""
    histogram = stats.histogram_density(values, 0.05, (-5.025, 5.025))
    return np.array([
        abs(observed - density.evaluate_density(model, center).value) / error
        for center, observed, error in histogram.rows()[::5]
    ])


def check_histogram_agreement(full: bool) -> Tuple[bool, Dict[str, Any]]:
    count = _sizes(full)["histogram"]
    if not count:
        return True, {"skipped": "full suite only"}

    samplers = {
        TransformKind.ABS_RATIO: transforms.sample_abs_ratio,
        TransformKind.STOPPED_BM: transforms.sample_stopped_bm_path,
    }
    rows = []
    for offset, (kind, theta, w) in enumerate(HISTOGRAM_GRID):
        model = DensityModel(kind=kind, theta=theta, w=w)
        values = samplers[kind](gauss.theta_to_covariance(theta), w, count, _seed("histogram_agreement", offset)).values
        z = histogram_z_scores(values, model)
        rows.append({"kind": kind.value, "theta": theta, "w": w, "max_z": float(np.max(z)), "passes": bool(np.all(z < 4.0))})
    return all(row["passes"] for row in rows), {"count": count, "cases": rows}


def check_bm_cross_oracle(full: bool) -> Tuple[bool, Dict[str, Any]]:
    count = _sizes(full)["ks"]
    rows = []
    for i, theta in enumerate(CROSS_ORACLE_THETAS):
        sigma = gauss.theta_to_covariance(theta)
        for j, w in enumerate(WEIGHT_GRID):

            def test(seed: int) -> KSResult:
                path = transforms.sample_stopped_bm_path(sigma, w, count, seed)
                mixture = transforms.sample_stopped_bm_mixture(theta, w, count, seed + 1000)
                return stats.ks_two_sample(path.values, mixture.values, settings.KS_ALPHA)

            rows.append({"theta": theta, "w": w, **_confirmed(test, _seed("bm_cross_oracle", 10 * i + j))})
    return all(row["passes"] for row in rows), {"count": count, "cases": rows}


def check_multivariate_cauchy(full: bool) -> Tuple[bool, Dict[str, Any]]:
    count = _sizes(full)["ks"]

    @lru_cache(maxsize=2)
    def axis_draws(seed: int) -> np.ndarray:
        return cauchy.sample_mv_cauchy(SpectralMeasure.axes(3), count, seed).values

    axis_ks = [
        _ks_cauchy(lambda s, j=j: axis_draws(s)[:, j], _seed("multivariate_cauchy"))["passes"]
        for j in range(3)
    ]

    diagonal = cauchy.sample_mv_cauchy(SpectralMeasure.diagonal(3), count, _seed("multivariate_cauchy", 1)).values
    identical = bool(np.all(diagonal == diagonal[:, :1]))

    mixed = SpectralMeasure.from_vectors([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], [0.5, 0.5, 0.5])
    draws = cauchy.sample_mv_cauchy(mixed, count, _seed("multivariate_cauchy", 2)).values
    angles = np.linspace(0.0, np.pi, 20, endpoint=False)
    points = np.column_stack([np.cos(angles), np.sin(angles)]) * 0.75
    z_scores = []
    for point in points:
        value, error = stats.empirical_charfn(draws, point)
        z_scores.append(abs(value - float(cauchy.mv_cauchy_charfn(point, mixed))) / error)

    passed = all(axis_ks) and identical and max(z_scores) < 5.0
    return passed, {"axis_ks": axis_ks, "diagonal_identical": identical, "max_charfn_z": max(z_scores)}

CRITERIA: List[Tuple[str, Callable[[bool], Tuple[bool, Dict[str, Any]]]]] = [
    ("cauchy_identity", check_cauchy_identity),
    ("ratio_transform", check_ratio_transform),
    ("diagonal_case", check_diagonal_case),
    ("non_cauchy_detection", check_non_cauchy_detection),
    ("derivatives", check_derivatives),
    ("tail_limit", check_tail_limit),
    ("normalization", check_normalization),
    ("histogram_agreement", check_histogram_agreement),
    ("bm_cross_oracle", check_bm_cross_oracle),
    ("multivariate_cauchy", check_multivariate_cauchy),
]


def run_suite(suite: str = "quick") -> VerificationReport:
    if suite not in ("quick", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    full = suite == "full"
    report = VerificationReport(suite)

    for name, check in CRITERIA:
        start = time.perf_counter()
        try:
            passed, details = check(full)
            report.record(CriterionResult(name, bool(passed), time.perf_counter() - start, details))
        except HeavyTailError as e:
            logger.error(f"Criterion {name} raised: {str(e)}")
            report.record(CriterionResult(name, False, time.perf_counter() - start, error=str(e)))

    return report
