"""
heavytail command-line interface

Subcommands:
- sample      draw from one of the three transformations (CSV index,value)
- density     evaluate g_V on a v-grid (CSV v,g_v,err_est)
- tail        evaluate v^2 g_V(v) (CSV v,v2_gv)
- derivative  d g_V(0)/d theta at theta = 0, quadrature vs finite difference (JSON)
- sweep       Cauchy / not-Cauchy verdicts over a theta grid (JSON {manifest, results})
- verify      run the acceptance suite (exit 3 on failure)
- config      show the effective configuration

Exit codes: 0 success, 1 usage, 2 numerical failure, 3 verification failure.
Negative grid arguments must be attached with '=', e.g. --grid=-5:5:101.
"""

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from heavytail.core.config import PINNED_SEED, settings
from heavytail.core.errors import (
    EXIT_OK,
    EXIT_USAGE,
    HeavyTailError,
    QuadratureNonconvergenceError,
    UsageError,
    VerificationFailedError,
)
from heavytail.models import CovarianceMatrix, DensityModel, RunManifest, TransformKind, Weights
from heavytail.services import density, transforms, verification
from heavytail.services.gauss import theta_to_covariance

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
SWEEP_OUTPUT = 'Writes one JSON object {"manifest": {...}, "results": [verdict, ...]}, verdicts in theta order.'


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors as exceptions"""

    def error(self, message):
        raise UsageError(message)


def parse_grid(text: str) -> np.ndarray:
    """vmin:vmax:steps -> steps evenly spaced points"""
    try:
        low, high, steps = text.split(":")
        low, high, steps = float(low), float(high), int(steps)
    except ValueError:
        raise UsageError(f"malformed grid {text!r}, expected vmin:vmax:steps")
    if steps < 1 or high < low:
        raise UsageError(f"grid {text!r} must have steps >= 1 and vmin <= vmax")
    return np.linspace(low, high, steps)


def parse_theta_grid(text: str) -> List[float]:
    """a:b:step -> a, a+step, ..., b (inclusive)"""
    try:
        low, high, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise UsageError(f"malformed theta grid {text!r}, expected a:b:step")
    if step <= 0 or high < low:
        raise UsageError(f"theta grid {text!r} must have step > 0 and a <= b")
    count = int(round((high - low) / step)) + 1
    # rounding keeps grid points such as 0 exact
    return [float(value) + 0.0 for value in np.round(low + step * np.arange(count), 12)]


def parse_values(text: str) -> List[float]:
    parts = [part for part in text.split(",") if part.strip()]
    if not parts:
        raise UsageError("expected a non-empty comma-separated list of values")
    try:
        return [float(part) for part in parts]
    except ValueError:
        raise UsageError(f"malformed value list {text!r}")


@contextmanager
def open_output(path: Optional[str]):
    if path in (None, "-"):
        yield sys.stdout
        return
    with open(path, "w", newline="") as handle:
        yield handle


def _parameters(args: argparse.Namespace) -> dict:
    return {key: value for key, value in vars(args).items() if key not in ("handler", "verbose")}


def _manifest(args: argparse.Namespace, seed: Optional[int] = None, **extra) -> RunManifest:
    manifest = RunManifest(subcommand=args.command, parameters={**_parameters(args), **extra}, seed=seed)
    print(manifest.model_dump_json(), file=sys.stderr)
    return manifest


def write_csv(path: Optional[str], manifest: RunManifest, header: Sequence[str], rows: Iterable[Sequence]):
    with open_output(path) as handle:
        handle.write(f"# manifest {manifest.model_dump_json()}\n")
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(value if isinstance(value, str) else _format(value) for value in row) + "\n")


def write_json(path: Optional[str], payload: dict):
    with open_output(path) as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def _format(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _density_model(args: argparse.Namespace) -> DensityModel:
    weights = Weights.parse(args.weights)
    if len(weights) != 2:
        raise UsageError(f"density evaluation needs exactly two weights, got {len(weights)}")
    return DensityModel(kind=args.transform, theta=args.theta, w=weights.values)


def cmd_sample(args: argparse.Namespace) -> int:
    weights = Weights.parse(args.weights)
    kind = TransformKind(args.transform)

    if args.method == "mixture":
        if kind != TransformKind.STOPPED_BM or args.theta is None:
            raise UsageError("--method mixture needs --transform bm and --theta")
        batch = transforms.sample_stopped_bm_mixture(args.theta, weights, args.n, args.seed)
    else:
        if args.cov is not None:
            sigma = CovarianceMatrix.from_text(Path(args.cov).read_text())
        else:
            sigma = theta_to_covariance(args.theta)
        sampler = {
            TransformKind.RATIO_PM: transforms.sample_ratio_pm,
            TransformKind.ABS_RATIO: transforms.sample_abs_ratio,
            TransformKind.STOPPED_BM: transforms.sample_stopped_bm_path,
        }[kind]
        batch = sampler(sigma, weights, args.n, args.seed)

    manifest = _manifest(args, seed=args.seed, batch_size=settings.BATCH_SIZE, covariance=batch.meta["covariance"])
    write_csv(args.out, manifest, ("index", "value"), enumerate(batch.values))
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    model = _density_model(args)
    grid = parse_grid(args.grid)

    rows = []
    for v in grid:
        try:
            result = density.evaluate_density(model, float(v))
        except QuadratureNonconvergenceError as e:
            raise QuadratureNonconvergenceError(f"density at v={v!r}: {e}", e.value, e.error_estimate) from e
        rows.append((float(v), result.value, result.error_estimate))

    write_csv(args.out, _manifest(args), ("v", "g_v", "err_est"), rows)
    return EXIT_OK


def cmd_tail(args: argparse.Namespace) -> int:
    model = _density_model(args)
    values = parse_values(args.v_values)

    rows = []
    for v in values:
        try:
            rows.append((v, density.tail_functional(model, v)))
        except QuadratureNonconvergenceError as e:
            raise QuadratureNonconvergenceError(f"tail at v={v!r}: {e}", e.value, e.error_estimate) from e

    write_csv(args.out, _manifest(args), ("v", "v2_gv"), rows)
    return EXIT_OK


def cmd_derivative(args: argparse.Namespace) -> int:
    weights = Weights.parse(args.weights)
    if len(weights) != 2:
        raise UsageError(f"derivative needs exactly two weights, got {len(weights)}")
    kind = TransformKind(args.transform)

    payload = {
        "quadrature_value": density.dgv0_dtheta_at_zero(kind, weights.values),
        "finite_difference_value": density.finite_difference_derivative(kind, weights.values, args.h),
        "h": args.h,
    }
    payload["manifest"] = _manifest(args).model_dump()
    write_json(args.out, payload)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.transform == TransformKind.RATIO_PM.value:
        raise UsageError("the pm transform is standard Cauchy for every covariance; use `sample` to test it")
    weights = Weights.parse(args.weights)
    if len(weights) != 2:
        raise UsageError(f"sweep needs exactly two weights, got {len(weights)}")
    thetas = parse_theta_grid(args.theta_grid)
    if any(not -1.0 < theta < 1.0 for theta in thetas):
        raise UsageError(f"theta grid {args.theta_grid!r} leaves (-1, 1)")

    verdicts = density.sweep_verdicts(args.transform, thetas, weights.values, decision_tol=args.decision_tol)
    write_json(args.out, {
        "manifest": _manifest(args).model_dump(),
        "results": [verdict.model_dump(mode="json") for verdict in verdicts],
    })
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = verification.run_suite(args.suite)
    status = report.get_status()
    status["manifest"] = _manifest(args, seed=PINNED_SEED).model_dump()

    if report.passed:
        write_json(args.out, status)
        print(f"✅ {args.suite} suite passed ({len(report.results)} criteria)", file=sys.stderr)
        return EXIT_OK

    failures = report.failures()
    write_json(args.out, {**status, "failures": failures})
    print(f"❌ {args.suite} suite failed: {', '.join(f['name'] for f in failures)}", file=sys.stderr)
    raise VerificationFailedError(f"{len(failures)} of {len(report.results)} criteria failed", failures)


def cmd_config(args: argparse.Namespace) -> int:
    print(settings.model_dump_json(indent=2))
    return EXIT_OK


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="heavytail", description="Normal-to-Cauchy transformations: sampling, densities, verdicts")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--workers", type=int, default=None, help=f"worker pool width (default: {settings.WORKERS})")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sample = subparsers.add_parser("sample", help="draw from a transformation")
    sample.add_argument("--transform", choices=[kind.value for kind in TransformKind], required=True)
    source = sample.add_mutually_exclusive_group(required=True)
    source.add_argument("--theta", type=float, help="two-coordinate theta-parametrization")
    source.add_argument("--cov", help="file with an n x n covariance matrix, whitespace-separated rows")
    sample.add_argument("--weights", required=True, help="w1,w2,... in [0,1] summing to 1")
    sample.add_argument("--n", type=int, required=True, help="number of draws")
    sample.add_argument("--seed", type=int, default=settings.SEED, help="default: HEAVYTAIL_SEED")
    sample.add_argument("--method", choices=["path", "mixture"], default="path", help="stopped-BM construction")
    sample.add_argument("--out", default="-")
    sample.set_defaults(handler=cmd_sample)

    dens = subparsers.add_parser("density", help="evaluate g_V on a grid")
    dens.add_argument("--transform", choices=["abs", "bm"], required=True)
    dens.add_argument("--theta", type=float, required=True)
    dens.add_argument("--weights", required=True)
    dens.add_argument("--grid", required=True, help="vmin:vmax:steps")
    dens.add_argument("--out", default="-")
    dens.set_defaults(handler=cmd_density)

    tail = subparsers.add_parser("tail", help="evaluate v^2 g_V(v)")
    tail.add_argument("--transform", choices=["abs", "bm"], required=True)
    tail.add_argument("--theta", type=float, required=True)
    tail.add_argument("--weights", required=True)
    tail.add_argument("--v-values", required=True, help="comma-separated positive v values")
    tail.add_argument("--out", default="-")
    tail.set_defaults(handler=cmd_tail)

    derivative = subparsers.add_parser("derivative", help="theta-derivative of g_V(0) at theta = 0")
    derivative.add_argument("--transform", choices=["abs", "bm"], required=True)
    derivative.add_argument("--weights", required=True)
    derivative.add_argument("--h", type=float, default=settings.FD_STEP, help="finite-difference step")
    derivative.add_argument("--out", default="-")
    derivative.set_defaults(handler=cmd_derivative)

    sweep = subparsers.add_parser(
        "sweep",
        help="Cauchy verdicts over a theta grid",
        description=SWEEP_OUTPUT,
    )
    sweep.add_argument("--transform", choices=[kind.value for kind in TransformKind], required=True)
    sweep.add_argument("--theta-grid", required=True, help="a:b:step, inclusive")
    sweep.add_argument("--weights", required=True)
    sweep.add_argument("--decision-tol", type=float, default=None, help=f"default: {settings.DECISION_TOL}")
    sweep.add_argument("--out", default="-", help="JSON object with `manifest` and `results` keys")
    sweep.set_defaults(handler=cmd_sweep)

    verify = subparsers.add_parser("verify", help="run the acceptance suite")
    verify.add_argument("--suite", choices=["quick", "full"], default="quick")
    verify.add_argument("--out", default="-")
    verify.set_defaults(handler=cmd_verify)

    config = subparsers.add_parser("config", help="show the effective configuration")
    config.set_defaults(handler=cmd_config)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    if args.workers is not None:
        settings.WORKERS = args.workers

    try:
        return args.handler(args)
    except HeavyTailError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"{args.command}: invalid parameters: {str(e)}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"{args.command}: {str(e)}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
