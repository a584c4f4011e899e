"""Command line front end: sweeps, fits, bound verification, sampling.

Outputs are CSV or JSON (UTF-8, LF line endings, 17-significant-digit floats);
each output file gets a JSON manifest sidecar recording the command, its
parameters, the seed, the library version, and wall time. Exit codes: 0 on
success, 1 for usage errors, 2 for numerical or verification failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .core import RelaxedCategorical, sample
from .divergence import (
    CA,
    MC,
    RECAB,
    kld_monte_carlo,
    recab,
    recab_gap,
    recab_lower_bound,
    temperature_ratio,
)
from .fitting import FitConfig, FitDivergenceError, fit_posterior
from .grids import density_grid, heatmap_sweep

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

GAP_IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class RunManifest:
    """Sidecar record tying an output file back to the run that produced it."""

    command: str
    parameters: dict
    seed: int
    version: str
    wall_time_seconds: float


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad flags; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _parse_positive_vector(text: str, flag: str, parser: _Parser, arity: int | None = None):
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        parser.error(f"{flag} must be a comma-separated list of numbers, got {text!r}")
    if arity is not None and len(values) != arity:
        parser.error(f"{flag} needs exactly {arity} entries, got {len(values)}")
    if len(values) < 2:
        parser.error(f"{flag} needs at least 2 entries, got {len(values)}")
    if any(not v > 0.0 for v in values):
        parser.error(f"{flag} entries must be strictly positive, got {text!r}")
    return np.array(values)


def _parse_dims(text: str, parser: _Parser) -> tuple[int, int]:
    try:
        if ".." in text:
            lo_text, hi_text = text.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
        else:
            lo = hi = int(text)
    except ValueError:
        parser.error(f"--dims must look like '2..10' or '4', got {text!r}")
    if lo < 2 or hi < lo:
        parser.error(f"--dims range must satisfy 2 <= lo <= hi, got {text!r}")
    return lo, hi


def _parse_temp_range(text: str, parser: _Parser) -> tuple[float, float]:
    try:
        lo_text, hi_text = text.split(",", 1)
        lo, hi = float(lo_text), float(hi_text)
    except ValueError:
        parser.error(f"--temp-range must look like 'lo,hi', got {text!r}")
    if not (0.0 < lo <= hi):
        parser.error(f"--temp-range must satisfy 0 < lo <= hi, got {text!r}")
    return lo, hi


def _write_manifest(out_path: str, command: str, parameters: dict, seed: int, started: float):
    manifest = RunManifest(
        command=command,
        parameters=parameters,
        seed=seed,
        version=__version__,
        wall_time_seconds=time.perf_counter() - started,
    )
    sidecar = Path(str(out_path) + ".manifest.json")
    sidecar.write_text(json.dumps(asdict(manifest), indent=2) + "\n", encoding="utf-8")


def _write_lines(out_path: str, lines):
    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cmd_heatmap(args, parser: _Parser) -> int:
    started = time.perf_counter()
    target_logits = _parse_positive_vector(args.target_logits, "--target-logits", parser, arity=3)
    estimators = [tag.strip() for tag in args.estimators.split(",") if tag.strip()]
    allowed = {MC, CA, RECAB}
    if not estimators or any(tag not in allowed for tag in estimators):
        parser.error(f"--estimators must be a comma-separated subset of mc,ca,recab, got {args.estimators!r}")
    if args.target_temp <= 0 or args.proposal_temp <= 0:
        parser.error("temperatures must be positive")
    if args.resolution < 3:
        parser.error(f"--resolution must be >= 3, got {args.resolution}")
    if args.mc_samples < 2:
        parser.error(f"--mc-samples must be >= 2, got {args.mc_samples}")

    target = RelaxedCategorical(np.log(target_logits), args.target_temp)
    grid = heatmap_sweep(
        target,
        proposal_temperature=args.proposal_temp,
        resolution=args.resolution,
        estimators=estimators,
        mc_samples=args.mc_samples,
        seed=args.seed,
    )

    lines = ["b1,b2,b3,estimator,value,std_error"]
    mc_errs = grid.std_errors.get(MC)
    for index, cell in enumerate(grid.coords):
        for tag in estimators:
            err = _fmt(mc_errs[index]) if tag == MC else ""
            lines.append(
                f"{_fmt(cell[0])},{_fmt(cell[1])},{_fmt(cell[2])},{tag},"
                f"{_fmt(grid.values[tag][index])},{err}"
            )
    _write_lines(args.out, lines)
    _write_manifest(
        args.out,
        "heatmap",
        {
            "target_logits": args.target_logits,
            "target_temp": args.target_temp,
            "proposal_temp": args.proposal_temp,
            "resolution": args.resolution,
            "estimators": estimators,
            "mc_samples": args.mc_samples,
            "out": str(args.out),
        },
        args.seed,
        started,
    )
    return EXIT_OK


def _cmd_fit(args, parser: _Parser) -> int:
    started = time.perf_counter()
    target_logits = _parse_positive_vector(args.target_logits, "--target-logits", parser)
    if args.target_temp <= 0 or args.posterior_temp <= 0:
        parser.error("temperatures must be positive")
    if args.iters < 1:
        parser.error(f"--iters must be >= 1, got {args.iters}")
    if args.step <= 0:
        parser.error(f"--step must be positive, got {args.step}")
    init = None
    if args.init_logits is not None:
        init_logits = _parse_positive_vector(args.init_logits, "--init-logits", parser,
                                             arity=len(target_logits))
        init = RelaxedCategorical(np.log(init_logits), args.posterior_temp)

    target = RelaxedCategorical(np.log(target_logits), args.target_temp)
    cfg = FitConfig(
        estimator=args.estimator,
        step_size=args.step,
        max_iters=args.iters,
        grad_tolerance=args.grad_tol,
        mc_samples=args.mc_samples,
        mc_fd_step=args.fd_step,
        seed=args.seed,
        track_trajectory=args.trace,
    )

    diverged = False
    try:
        result = fit_posterior(target, init, args.posterior_temp, cfg)
    except FitDivergenceError as exc:
        diverged = True
        result = exc.last_result
        print(f"fit diverged: {exc}", file=sys.stderr)

    report = {"estimator": args.estimator, "diverged": diverged}
    if result is not None:
        report.update(
            {
                "fitted_log_logits": [float(v) for v in result.fitted.log_logits],
                "fitted_normalized_logits": [float(v) for v in result.fitted.probs],
                "posterior_temperature": result.fitted.temperature,
                "final_value": result.final_value,
                "iterations": result.iterations,
                "converged": result.converged and not diverged,
                "trajectory": [[i, v] for i, v in result.trajectory] if result.trajectory else None,
            }
        )
    else:
        report["converged"] = False
    Path(args.out).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    _write_manifest(
        args.out,
        "fit",
        {
            "estimator": args.estimator,
            "target_logits": args.target_logits,
            "target_temp": args.target_temp,
            "posterior_temp": args.posterior_temp,
            "step": args.step,
            "iters": args.iters,
            "grad_tol": args.grad_tol,
            "mc_samples": args.mc_samples,
            "fd_step": args.fd_step,
            "trace": args.trace,
            "init_logits": args.init_logits,
            "out": str(args.out),
        },
        args.seed,
        started,
    )
    return EXIT_NUMERICAL if diverged else EXIT_OK


def run_bound_verification(trials: int, dims: tuple[int, int], temp_range: tuple[float, float],
                           mc_samples: int, seed: int) -> dict:
    """Sample random posterior/prior pairs and check the bound sandwich plus the gap identity.

    Returns a JSON-ready report; the run passes when no violation of
    lower <= MC + 3 sigma, MC - 3 sigma <= upper, or the exact gap identity shows up.
    """
    violations = {"upper": [], "lower": [], "gap_identity": []}
    max_gap_error = 0.0
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        n = int(rng.integers(dims[0], dims[1] + 1))
        q = RelaxedCategorical(rng.normal(0.0, 1.5, n), float(rng.uniform(*temp_range)))
        p = RelaxedCategorical(rng.normal(0.0, 1.5, n), float(rng.uniform(*temp_range)))

        mc = kld_monte_carlo(q, p, mc_samples, rng)
        upper = recab(q, p).value
        lower = recab_lower_bound(q, p).value
        t = temperature_ratio(p.temperature, q.temperature)
        gap_error = abs((upper - lower) - recab_gap(n, t))
        max_gap_error = max(max_gap_error, gap_error)

        record = {
            "trial": trial,
            "n": n,
            "temperature_ratio": t,
            "mc_value": mc.value,
            "mc_std_error": mc.std_error,
            "recab": upper,
            "recab_lower": lower,
        }
        if upper < mc.value - 3.0 * mc.std_error:
            violations["upper"].append(record)
        if lower > mc.value + 3.0 * mc.std_error:
            violations["lower"].append(record)
        if gap_error > GAP_IDENTITY_TOL:
            violations["gap_identity"].append({**record, "gap_error": gap_error})

    passed = not any(violations.values())
    return {
        "trials": trials,
        "dims": list(dims),
        "temp_range": list(temp_range),
        "mc_samples": mc_samples,
        "seed": seed,
        "max_gap_identity_error": max_gap_error,
        "violations": violations,
        "passed": passed,
    }


def _cmd_verify_bound(args, parser: _Parser) -> int:
    started = time.perf_counter()
    dims = _parse_dims(args.dims, parser)
    temp_range = _parse_temp_range(args.temp_range, parser)
    if args.trials < 1:
        parser.error(f"--trials must be >= 1, got {args.trials}")
    if args.mc_samples < 2:
        parser.error(f"--mc-samples must be >= 2, got {args.mc_samples}")

    report = run_bound_verification(args.trials, dims, temp_range, args.mc_samples, args.seed)
    text = json.dumps(report, indent=2) + "\n"
    if args.out is not None:
        Path(args.out).write_text(text, encoding="utf-8")
        _write_manifest(
            args.out,
            "verify-bound",
            {
                "trials": args.trials,
                "dims": args.dims,
                "temp_range": args.temp_range,
                "mc_samples": args.mc_samples,
                "out": str(args.out),
            },
            args.seed,
            started,
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def _cmd_sample(args, parser: _Parser) -> int:
    started = time.perf_counter()
    logits = _parse_positive_vector(args.logits, "--logits", parser)
    if args.temp <= 0:
        parser.error("--temp must be positive")
    if args.count < 0:
        parser.error(f"--count must be nonnegative, got {args.count}")

    params = RelaxedCategorical(np.log(logits), args.temp)
    draws = sample(params, np.random.default_rng(args.seed), args.count)
    lines = [",".join(f"z{k + 1}" for k in range(params.n))]
    lines.extend(",".join(_fmt(v) for v in row) for row in draws)
    _write_lines(args.out, lines)
    _write_manifest(
        args.out,
        "sample",
        {"logits": args.logits, "temp": args.temp, "count": args.count, "out": str(args.out)},
        args.seed,
        started,
    )
    return EXIT_OK


def _cmd_density(args, parser: _Parser) -> int:
    started = time.perf_counter()
    logits = _parse_positive_vector(args.logits, "--logits", parser, arity=3)
    if args.temp <= 0:
        parser.error("--temp must be positive")
    if args.resolution < 3:
        parser.error(f"--resolution must be >= 3, got {args.resolution}")

    params = RelaxedCategorical(np.log(logits), args.temp)
    grid = density_grid(params, args.resolution)
    lines = ["b1,b2,b3,density"]
    dens = grid.values["density"]
    lines.extend(
        f"{_fmt(cell[0])},{_fmt(cell[1])},{_fmt(cell[2])},{_fmt(dens[index])}"
        for index, cell in enumerate(grid.coords)
    )
    _write_lines(args.out, lines)
    _write_manifest(
        args.out,
        "density",
        {"logits": args.logits, "temp": args.temp, "resolution": args.resolution,
         "out": str(args.out)},
        args.seed,
        started,
    )
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="recab", description="Relaxed categorical KLD estimators and sweeps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    heatmap = sub.add_parser("heatmap", help="divergence heatmap over the 2-simplex (CSV)")
    heatmap.add_argument("--target-logits", required=True)
    heatmap.add_argument("--target-temp", type=float, default=1.0)
    heatmap.add_argument("--proposal-temp", type=float, default=1.0)
    heatmap.add_argument("--resolution", type=int, default=100)
    heatmap.add_argument("--estimators", default="mc,ca,recab")
    heatmap.add_argument("--mc-samples", type=int, default=32)
    heatmap.add_argument("--seed", type=int, default=0)
    heatmap.add_argument("--out", required=True)
    heatmap.set_defaults(func=_cmd_heatmap)

    fit = sub.add_parser("fit", help="fit posterior logits to a target (JSON)")
    fit.add_argument("--estimator", required=True, choices=[MC, CA, RECAB])
    fit.add_argument("--target-logits", required=True)
    fit.add_argument("--target-temp", type=float, default=1.0)
    fit.add_argument("--posterior-temp", type=float, default=1.0)
    fit.add_argument("--step", type=float, default=0.05)
    fit.add_argument("--iters", type=int, default=5000)
    fit.add_argument("--grad-tol", type=float, default=1e-5)
    fit.add_argument("--mc-samples", type=int, default=32)
    fit.add_argument("--fd-step", type=float, default=1e-2)
    fit.add_argument("--init-logits", default=None)
    fit.add_argument("--trace", action="store_true")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--out", required=True)
    fit.set_defaults(func=_cmd_fit)

    verify = sub.add_parser("verify-bound", help="check the bound sandwich on random pairs (JSON)")
    verify.add_argument("--trials", type=int, default=500)
    verify.add_argument("--dims", default="2..10")
    verify.add_argument("--temp-range", default="0.1,5")
    verify.add_argument("--mc-samples", type=int, default=10000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", default=None)
    verify.set_defaults(func=_cmd_verify_bound)

    sample_cmd = sub.add_parser("sample", help="draw simplex samples (CSV)")
    sample_cmd.add_argument("--logits", required=True)
    sample_cmd.add_argument("--temp", type=float, default=1.0)
    sample_cmd.add_argument("--count", type=int, default=1000)
    sample_cmd.add_argument("--seed", type=int, default=0)
    sample_cmd.add_argument("--out", required=True)
    sample_cmd.set_defaults(func=_cmd_sample)

    density = sub.add_parser("density", help="density raster over the 2-simplex (CSV)")
    density.add_argument("--logits", required=True)
    density.add_argument("--temp", type=float, default=1.0)
    density.add_argument("--resolution", type=int, default=100)
    density.add_argument("--seed", type=int, default=0)
    density.add_argument("--out", required=True)
    density.set_defaults(func=_cmd_density)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, parser)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
