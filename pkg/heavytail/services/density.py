"""
Exact numerical evaluation of the two-coordinate density families.

AbsRatio (V = w1 X1/|Y1| + w2 X2/|Y2|) has a density written as two
integrals over (0, inf); StoppedBM (V = w1 X1(Y1^-2) + w2 X2(Y2^-2)) as four
integrals over [0, 1]. Both use the covariance whose inverse is
[[1, theta], [theta, 1]].

From these the module derives g_V(0), its theta-derivative at theta = 0,
the tail functional v^2 g_V(v) (limit 1/pi), a normalization check and the
Cauchy / not-Cauchy verdict: once the tail pins the would-be Cauchy scale to
1, a Cauchy g_V must satisfy g_V(0) = 1/pi.
"""

import logging
import math
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from scipy import integrate

from heavytail.core.config import settings
from heavytail.core.errors import ParameterOutOfRangeError, QuadratureNonconvergenceError
from heavytail.core.pool import run_ordered
from heavytail.models import CauchyVerdict, DensityModel, IntegralResult, QuadratureConfig, TransformKind

logger = logging.getLogger(__name__)

INV_PI = 1.0 / math.pi
NORMALIZATION_TOL = 1e-6

Integrand = Callable[[float], float]


def _config(cfg: Optional[QuadratureConfig]) -> QuadratureConfig:
    return cfg if cfg is not None else QuadratureConfig.from_settings()


def _model(kind, theta: float, w: Sequence[float]) -> DensityModel:
    return DensityModel(kind=kind, theta=theta, w=tuple(w))


def integrate_adaptive(
    f: Integrand,
    lower: float,
    upper: float,
    cfg: Optional[QuadratureConfig] = None,
    points: Optional[Iterable[float]] = None,
) -> IntegralResult:
    """
    Adaptive Gauss-Kronrod quadrature (QUADPACK) of f over [lower, upper].

    A semi-infinite range is mapped to [0, 1) through x = lower + u/(1-u) with
    Jacobian 1/(1-u)^2. `points` are interior break points in the original
    variable; they seed the subdivision where the integrand concentrates.
    """
    cfg = _config(cfg)
    if math.isinf(upper):
        if math.isinf(lower):
            raise ParameterOutOfRangeError("lower limit must be finite")

        def g(u: float) -> float:
            return f(lower + u / (1.0 - u)) / (1.0 - u) ** 2

        a, b = 0.0, 1.0
        mapped = [(p - lower) / (1.0 + p - lower) for p in (points or ()) if p > lower]
    else:
        g, a, b = f, lower, upper
        mapped = list(points or ())

    mapped = sorted({p for p in mapped if a < p < b})
    result = integrate.quad(
        g, a, b,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions,
        points=mapped or None,
        full_output=1,
    )
    value, error, info = result[0], result[1], result[2]

    if len(result) > 3:
        logger.error(f"Quadrature on [{lower}, {upper}] failed: {result[3]}")
        raise QuadratureNonconvergenceError(
            f"quadrature on [{lower}, {upper}] did not converge: {result[3]}",
            value=value,
            error_estimate=error,
        )

    logger.debug(f"Quadrature on [{lower}, {upper}]: value={value:.15g}, err={error:.3e}, intervals={info['last']}")
    return IntegralResult(value=float(value), error_estimate=float(error), subdivisions_used=int(info["last"]))


# Integrand families. `scale` multiplies every integrand so that quantities
# much smaller than the absolute tolerance (g_V at large |v|) are integrated
# at order one.

def _abs_integrands(v: float, theta: float, w1: float, w2: float, scale: float = 1.0) -> List[Integrand]:
    d = 1.0 - theta * theta
    v2 = v * v

    def make(sign: float) -> Integrand:
        def f(x: float) -> float:
            a = w2 * w2 * x * x - 2.0 * theta * w1 * w2 * x + w1 * w1
            b = x * x + sign * 2.0 * theta * x + 1.0
            return scale * d * a * x / (2.0 * math.pi * (a * b + d * v2 * x * x) ** 1.5)
        return f

    return [make(1.0), make(-1.0)]


def _bm_integrands(v: float, theta: float, w1: float, w2: float, scale: float = 1.0) -> List[Integrand]:
    d = 1.0 - theta * theta
    v2 = v * v

    def make(p: float, q: float, sign: float) -> Integrand:
        def f(x: float) -> float:
            a = p * p - 2.0 * w1 * w2 * theta * x * x + q * q * x * x
            b = x * x + sign * 2.0 * theta * x + 1.0
            return scale * d * a * x / (2.0 * math.pi * (a * b + d * x * x * v2) ** 1.5)
        return f

    return [make(w1, w2, 1.0), make(w1, w2, -1.0), make(w2, w1, 1.0), make(w2, w1, -1.0)]


def _support(kind: TransformKind) -> Tuple[float, float]:
    return (0.0, math.inf) if kind == TransformKind.ABS_RATIO else (0.0, 1.0)


def _breakpoints(kind: TransformKind, v: float) -> List[float]:
    v = abs(v)
    if v <= 1.0:
        return []
    if kind == TransformKind.ABS_RATIO:
        return [1.0 / v, 1.0, v]
    return [1.0 / v]


def _density(model: DensityModel, v: float, cfg: QuadratureConfig, scale: float = 1.0) -> IntegralResult:
    builder = _abs_integrands if model.kind == TransformKind.ABS_RATIO else _bm_integrands
    lower, upper = _support(model.kind)
    points = _breakpoints(model.kind, v)

    total = IntegralResult(0.0, 0.0, 0)
    for f in builder(v, model.theta, model.w1, model.w2, scale):
        total = total + integrate_adaptive(f, lower, upper, cfg, points)
    return total


def gv_abs(v: float, theta: float, w: Sequence[float], cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    return _density(_model(TransformKind.ABS_RATIO, theta, w), v, _config(cfg))


def gv_bm(v: float, theta: float, w: Sequence[float], cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    return _density(_model(TransformKind.STOPPED_BM, theta, w), v, _config(cfg))


def evaluate_density(model: DensityModel, v: float, cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    """g_V(v) for whichever family the model selects"""
    return _density(model, v, _config(cfg))


def gv_zero(model: DensityModel, cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    """
    g_V(0) from the product-form integrands, coded independently of the
    general-v families so that the two cross-check each other.
    """
    cfg = _config(cfg)
    theta, w1, w2 = model.theta, model.w1, model.w2
    d = 1.0 - theta * theta

    if model.kind == TransformKind.ABS_RATIO:
        def make(sign: float) -> Integrand:
            def f(x: float) -> float:
                a = w2 ** 2 * x ** 2 - 2.0 * theta * w1 * w2 * x + w1 ** 2
                b = x ** 2 + sign * 2.0 * theta * x + 1.0
                return d * a * x / (2.0 * math.pi * a ** 1.5 * b ** 1.5)
            return f

        integrands, upper = [make(1.0), make(-1.0)], math.inf
    else:
        def make(p: float, q: float, sign: float) -> Integrand:
            def f(x: float) -> float:
                a = p ** 2 - 2.0 * w1 * w2 * theta * x ** 2 + q ** 2 * x ** 2
                b = x ** 2 + sign * 2.0 * theta * x + 1.0
                return d * a * x / (2.0 * math.pi * a ** 1.5 * b ** 1.5)
            return f

        integrands = [make(w1, w2, 1.0), make(w1, w2, -1.0), make(w2, w1, 1.0), make(w2, w1, -1.0)]
        upper = 1.0

    total = IntegralResult(0.0, 0.0, 0)
    for f in integrands:
        total = total + integrate_adaptive(f, 0.0, upper, cfg)
    return total


def dgv0_dtheta_at_zero(kind, w: Sequence[float], cfg: Optional[QuadratureConfig] = None) -> float:
    """d g_V(0) / d theta at theta = 0, differentiated under the integral"""
    model = _model(kind, 0.0, w)
    w1, w2 = model.w1, model.w2
    cfg = _config(cfg)

    if model.kind == TransformKind.ABS_RATIO:
        def f(x: float) -> float:
            return w1 * w2 * x * x / (math.pi * (w1 * w1 + w2 * w2 * x * x) ** 1.5 * (x * x + 1.0) ** 1.5)

        return integrate_adaptive(f, 0.0, math.inf, cfg).value

    def make(p: float, q: float) -> Integrand:
        def f(x: float) -> float:
            return w1 * w2 * x ** 3 / (math.pi * (p * p + q * q * x * x) ** 1.5 * (x * x + 1.0) ** 1.5)
        return f

    return sum(integrate_adaptive(f, 0.0, 1.0, cfg).value for f in (make(w1, w2), make(w2, w1)))


def tail_functional(model: DensityModel, v: float, cfg: Optional[QuadratureConfig] = None) -> float:
    """v^2 g_V(v); tends to 1/pi for every theta and w"""
    if not v > 0:
        raise ParameterOutOfRangeError(f"tail functional needs v > 0, got {v}")
    return _density(model, v, _config(cfg), scale=v * v).value


def tail_components(model: DensityModel, v: float, cfg: Optional[QuadratureConfig] = None) -> List[float]:
    """
    The separate pieces of v^2 g_V(v).

    AbsRatio: [part over x in [1, inf), part over x in [0, 1]], each summed
    over both signs. StoppedBM: the four [0, 1] integrals in family order.
    """
    if not v > 0:
        raise ParameterOutOfRangeError(f"tail components need v > 0, got {v}")
    cfg = _config(cfg)

    if model.kind == TransformKind.STOPPED_BM:
        return [
            integrate_adaptive(f, 0.0, 1.0, cfg, [1.0 / v]).value
            for f in _bm_integrands(v, model.theta, model.w1, model.w2, scale=v * v)
        ]

    integrands = _abs_integrands(v, model.theta, model.w1, model.w2, scale=v * v)
    outer = sum(integrate_adaptive(f, 1.0, math.inf, cfg, [v]).value for f in integrands)
    inner = sum(integrate_adaptive(f, 0.0, 1.0, cfg, [1.0 / v]).value for f in integrands)
    return [outer, inner]


def tail_component_limits(model: DensityModel) -> List[float]:
    if model.kind == TransformKind.STOPPED_BM:
        return [model.w1 / (2 * math.pi), model.w1 / (2 * math.pi), model.w2 / (2 * math.pi), model.w2 / (2 * math.pi)]
    return [model.w2 / math.pi, model.w1 / math.pi]


def normalization_check(model: DensityModel, cfg: Optional[QuadratureConfig] = None) -> float:
    """
    2 * integral of g_V over (0, inf).

    The outer variable is mapped with v = u/(1-u); each inner density is
    integrated with the outer Jacobian folded into its integrands, so the
    inner quadrature always works on an order-one quantity.
    """
    cfg = _config(cfg)
    outer_cfg = cfg.model_copy(update={
        "abs_tol": max(cfg.abs_tol, 1e-9),
        "rel_tol": max(cfg.rel_tol, 1e-7),
    })

    def h(u: float) -> float:
        jacobian = 1.0 / (1.0 - u) ** 2
        return _density(model, u / (1.0 - u), cfg, scale=jacobian).value

    total = integrate_adaptive(h, 0.0, 1.0, outer_cfg).scaled(2.0).value
    logger.info(f"Normalization of {model.kind.value} (theta={model.theta}, w={model.w}): {total:.12f}")
    return total


def finite_difference_derivative(kind, w: Sequence[float], h: float, cfg: Optional[QuadratureConfig] = None) -> float:
    """Central difference (g_V(0; +h) - g_V(0; -h)) / 2h"""
    if not 0.0 < h <= 1e-3:
        raise ParameterOutOfRangeError(f"finite-difference step must lie in (0, 1e-3], got {h}")
    cfg = _config(cfg)
    # the quadrature error is divided by 2h, so tighten it accordingly
    fd_cfg = cfg.model_copy(update={
        "abs_tol": min(cfg.abs_tol, 1e-13),
        "rel_tol": min(cfg.rel_tol, 1e-11),
    })
    plus = gv_zero(_model(kind, h, w), fd_cfg).value
    minus = gv_zero(_model(kind, -h, w), fd_cfg).value
    return (plus - minus) / (2.0 * h)


def joint_abs_ratio_density(r1: float, r2: float, theta: float, cfg: Optional[QuadratureConfig] = None) -> IntegralResult:
    """Joint density of (X1/|Y1|, X2/|Y2|) under the theta-parametrization"""
    if not -1.0 < theta < 1.0:
        raise ParameterOutOfRangeError(f"theta must lie in (-1, 1), got {theta}")
    cfg = _config(cfg)
    d = 1.0 - theta * theta

    def make(sign: float) -> Integrand:
        def f(x: float) -> float:
            q = x * x * (r1 * r1 + 1.0) + 2.0 * theta * x * (r1 * r2 + sign) + (r2 * r2 + 1.0)
            return d * x / (math.pi ** 2 * q * q)
        return f

    return integrate_adaptive(make(1.0), 0.0, math.inf, cfg) + integrate_adaptive(make(-1.0), 0.0, math.inf, cfg)


def cauchy_verdict(
    model: DensityModel,
    cfg: Optional[QuadratureConfig] = None,
    decision_tol: Optional[float] = None,
) -> CauchyVerdict:
    cfg = _config(cfg)
    decision_tol = settings.DECISION_TOL if decision_tol is None else decision_tol
    probe_v = settings.TAIL_PROBE_V

    gv0 = gv_zero(model, cfg).value
    tail = tail_functional(model, probe_v, cfg)
    normalization = normalization_check(model, cfg)
    normalization_ok = abs(normalization - 1.0) <= NORMALIZATION_TOL
    deviation = gv0 - INV_PI

    if not normalization_ok:
        logger.warning(f"Normalization check failed for {model}: integral = {normalization:.10f}")

    verdict = CauchyVerdict(
        model=model,
        gv0=gv0,
        gv0_minus_inv_pi=deviation,
        tail_value_at_v=(probe_v, tail),
        normalization=normalization,
        normalization_ok=normalization_ok,
        is_cauchy=abs(deviation) <= decision_tol and normalization_ok,
        decision_tol=decision_tol,
    )
    logger.info(
        f"Verdict {model.kind.value} theta={model.theta:+.4f} w={model.w}: "
        f"g_V(0) - 1/pi = {deviation:+.3e} -> {'Cauchy' if verdict.is_cauchy else 'not Cauchy'}"
    )
    return verdict


def sweep_verdicts(
    kind,
    thetas: Sequence[float],
    w: Sequence[float],
    cfg: Optional[QuadratureConfig] = None,
    decision_tol: Optional[float] = None,
    workers: Optional[int] = None,
) -> List[CauchyVerdict]:
    """Verdicts for every theta, returned in theta order"""
    cfg = _config(cfg)
    base = _model(kind, 0.0, w)
    models = [base.with_theta(float(theta)) for theta in thetas]
    logger.info(f"Sweeping {len(models)} theta values for {base.kind.value}")
    return run_ordered(cauchy_verdict, [(model, cfg, decision_tol) for model in models], workers=workers, processes=True)
