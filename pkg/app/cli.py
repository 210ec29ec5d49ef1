"""
Command line entry point: python -m app.cli <subcommand> ...

Exit codes: 0 success, 1 a check failed or the run hit a degenerate or
ambiguous projection, 2 usage or configuration error, 3 I/O error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from data.export import write_sequence_csv, write_sequence_json, write_verdicts_jsonl
from experiments import counterexample, finite_union
from schemas.map_schemas import MapConfig
from solvers import map_driver
from spiral import sequence
from spiral.verifier import SequenceVerifier
from utils.config import get_settings
from utils.errors import AltProjError, AmbiguousProjection, DegenerateProjection, DomainError
from utils.serialization import dumps
from utils.svg_plot import SpiralFigure

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

CORRUPT_SHIFT = 1e-6


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"  {path}: {err['msg']}")
    return "invalid configuration:\n" + "\n".join(lines)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------
def cmd_gen(args: argparse.Namespace) -> int:
    report = sequence.generate(args.n)
    if args.format == "csv":
        write_sequence_csv(report, args.out)
    else:
        write_sequence_json(report, args.out)
    print(f"✅ wrote {len(report)} records to {args.out}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.horizon < 2:
        raise DomainError("verify needs --horizon >= 2")
    report = sequence.generate(args.horizon + 1)
    if args.corrupt is not None:
        report = _corrupt(report, args.corrupt)
    nearest = args.nearest_horizon
    if nearest is None:
        nearest = min(get_settings().nearest_horizon, args.horizon)
    result = SequenceVerifier(nearest_horizon=nearest).run(report)
    for check in result.checks:
        mark = "✅" if check.passed else "❌"
        value = "" if check.value is None else f" value={check.value:.3e}"
        print(f"{mark} {check.name}{value}{' ' + check.detail if check.detail else ''}")
    if not result.passed:
        print(f"{len(result.failures())} check(s) failed over horizon {args.horizon}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    print(f"all {len(result.checks)} checks passed over horizon {args.horizon}")
    return EXIT_OK


def _corrupt(report, index: int):
    if not 0 <= index < len(report):
        raise DomainError(f"--corrupt index {index} outside 0..{len(report) - 1}")
    records = list(report.records)
    x, y = records[index].x
    records[index] = records[index].model_copy(update={"x": (x + CORRUPT_SHIFT, y)})
    logger.warning("corrupted record %d for a negative check", index)
    return report.model_copy(update={"records": records})


def cmd_plot(args: argparse.Namespace) -> int:
    if args.n < 2:
        raise DomainError("plot needs --n >= 2")
    report = sequence.generate(args.n)
    SpiralFigure(report, args.n).write(args.out)
    print(f"✅ wrote figure with {args.n} iterates to {args.out}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    config = MapConfig.model_validate_json(Path(args.config).read_text(encoding="utf-8"))
    trace = map_driver.run(config)
    if args.trace_out:
        map_driver.export_trace_json(trace, args.trace_out)
    verdict = trace.verdict
    summary = f"verdict: {verdict.kind} after {verdict.iterations_used} iterations"
    if verdict.limit is not None:
        summary += f", limit {dumps(verdict.limit)}"
    if verdict.ring_radius_estimate is not None:
        summary += f", ring radius ~ {verdict.ring_radius_estimate:.6g}"
    if verdict.heuristic:
        summary += " (heuristic)"
    print(summary)
    if trace.multivalued_events:
        print(f"{len(trace.multivalued_events)} multivalued projection(s) resolved by lowest index")
    return EXIT_OK


def cmd_union_batch(args: argparse.Namespace) -> int:
    seeds = range(args.seed_start, args.seed_start + args.seeds)
    verdicts = finite_union.run_batch(seeds, dim=args.dim, members_per_side=args.members,
                                      tol=args.tol, n_jobs=args.jobs)
    if args.out:
        write_verdicts_jsonl(verdicts, args.out)
    summary = finite_union.summarize(verdicts)
    print(f"{summary.total} scenarios: {summary.passed} pass, "
          f"{summary.hypotheses_not_met} hypotheses not met, {summary.failed} fail")
    if summary.failed:
        failed = [v.seed for v in verdicts if v.status == "fail"]
        print(f"❌ conclusion failed for seeds {failed}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_export_sets(args: argparse.Namespace) -> int:
    if 2 * args.pairs + 1 > args.horizon:
        raise DomainError(f"--pairs {args.pairs} needs --horizon >= {2 * args.pairs + 1}")
    sets = counterexample.build(args.horizon, args.variant)
    config = counterexample.to_map_config(sets, args.pairs)
    Path(args.out).write_text(dumps(config.model_dump(by_alias=True), indent=2) + "\n", encoding="utf-8")
    print(f"✅ wrote {args.variant} counterexample config ({args.horizon} points) to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altproj",
        description="Spiral counterexample and alternating-projection experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate the spiral iterate table")
    gen.add_argument("--n", type=_positive_int, required=True, help="number of records")
    gen.add_argument("--out", required=True, help="output path")
    gen.add_argument("--format", choices=["csv", "json"], default="csv")
    gen.set_defaults(func=cmd_gen)

    verify = sub.add_parser("verify", help="check the sequence identities and limits")
    verify.add_argument("--horizon", type=int, default=2000, help="last index N checked")
    verify.add_argument("--nearest-horizon", type=_positive_int, default=None,
                        help="points searched by the brute-force nearest check")
    verify.add_argument("--corrupt", type=int, default=None, help=argparse.SUPPRESS)
    verify.set_defaults(func=cmd_verify)

    plot = sub.add_parser("plot", help="draw the first iterates as SVG")
    plot.add_argument("--n", type=int, default=16, help="number of iterates drawn")
    plot.add_argument("--out", required=True, help="SVG output path")
    plot.set_defaults(func=cmd_plot)

    run = sub.add_parser("run", help="run alternating projections from a JSON config")
    run.add_argument("--config", required=True, help="MapConfig JSON file")
    run.add_argument("--trace-out", default=None, help="trace JSON output path")
    run.set_defaults(func=cmd_run)

    batch = sub.add_parser("union-batch", help="seeded finite-union convergence checks")
    batch.add_argument("--seed-start", type=int, default=0)
    batch.add_argument("--seeds", type=_positive_int, default=200, help="number of consecutive seeds")
    batch.add_argument("--dim", type=int, choices=[2, 3, 4], default=2)
    batch.add_argument("--members", type=int, choices=[1, 2, 3, 4], default=3, help="members per side")
    batch.add_argument("--tol", type=_positive_float, default=finite_union.DEFAULT_TOL)
    batch.add_argument("--jobs", type=int, default=None, help="joblib workers (default from settings)")
    batch.add_argument("--out", default=None, help="JSON-lines verdict output path")
    batch.set_defaults(func=cmd_union_batch)

    export = sub.add_parser("export-sets", help="write the counterexample sets as a MapConfig JSON")
    export.add_argument("--horizon", type=int, default=2000)
    export.add_argument("--variant", choices=["sphere", "disk"], default="sphere")
    export.add_argument("--pairs", type=_positive_int, default=500)
    export.add_argument("--out", required=True)
    export.set_defaults(func=cmd_export_sets)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    settings = get_settings()
    logging.basicConfig(level=settings.log_level.upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(_format_validation_error(exc), file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateProjection, AmbiguousProjection) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AltProjError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
