"""Command-line entry point: ``solve`` one instance or ``bench`` many runs.

Exit codes: 0 success, 2 usage error, 1 runtime error (unreadable instance,
parse failure, and the like).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .bench import (
    DEFAULT_CHECKPOINTS,
    VARIANTS,
    BenchConfig,
    load_problem,
    run_benchmark,
)
from .engine import SearchParams, run_search
from .errors import GnrpaError
from .samegame import DEFAULT_ZOBRIST_SEED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", choices=("tsptw", "samegame"), required=True)
    common.add_argument("--instance", required=True, help="path to the instance file")
    common.add_argument("--variant", choices=VARIANTS, default="gnrpa-beta")
    common.add_argument("--alpha", type=float, default=1.0, help="learning rate")
    common.add_argument("--tau", type=float, default=1.0, help="softmax temperature")
    common.add_argument("--levels", type=int, default=2, help="nesting depth")
    common.add_argument("--iterations", type=int, default=100, help="iterations per level")
    common.add_argument("--seed", type=int, default=0)
    budget = common.add_mutually_exclusive_group()
    budget.add_argument("--budget-seconds", type=float, help="wall-clock budget per run")
    budget.add_argument("--budget-playouts", type=int, help="playout-count budget per run")
    common.add_argument(
        "--bias-sign",
        choices=("negated", "literal"),
        default="negated",
        help="tsptw distance-bias convention (negated favors near cities)",
    )
    common.add_argument(
        "--zobrist-seed",
        type=lambda s: int(s, 0),
        default=DEFAULT_ZOBRIST_SEED,
        help="samegame move-code table seed",
    )

    parser = argparse.ArgumentParser(
        prog="gnrpa",
        description="Nested rollout policy adaptation with temperature and bias.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="run one search, print the best result")
    bench = sub.add_parser(
        "bench", parents=[common], help="run repeated seeded searches, emit CSV statistics"
    )
    bench.add_argument("--runs", type=int, default=20)
    bench.add_argument("--csv", help="write the report to this path (default: stdout)")
    bench.add_argument(
        "--checkpoints",
        help="comma-separated checkpoint values "
        f"(default {','.join(str(c) for c in DEFAULT_CHECKPOINTS)} seconds for "
        "wall-clock budgets, the budget itself for playout budgets)",
    )
    bench.add_argument("--workers", type=int, help="worker processes (default: cpu count)")
    return parser


def _search_params(args: argparse.Namespace) -> SearchParams:
    return SearchParams(
        alpha=args.alpha,
        tau=args.tau,
        iterations=args.iterations,
        levels=args.levels,
        max_seconds=args.budget_seconds,
        max_playouts=args.budget_playouts,
        seed=args.seed,
    )


def _bench_config(args: argparse.Namespace, *, runs: int = 1) -> BenchConfig:
    checkpoints = None
    if getattr(args, "checkpoints", None):
        checkpoints = tuple(float(v) for v in args.checkpoints.split(","))
    return BenchConfig(
        problem=args.problem,
        instance_path=args.instance,
        params=_search_params(args),
        variant=args.variant,
        runs=runs,
        checkpoints=checkpoints,
        output_path=getattr(args, "csv", None),
        bias_sign=args.bias_sign,
        zobrist_seed=args.zobrist_seed,
        workers=getattr(args, "workers", None),
    )


def _cmd_solve(args: argparse.Namespace) -> int:
    config = _bench_config(args)
    problem = load_problem(config)
    result = run_search(
        problem,
        config.params,
        use_optimized_adapt=config.variant == "gnrpa-beta-opt",
    )
    print(f"best score: {result.score}")
    print("moves: " + " ".join(str(m) for m in result.record.moves))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    config = _bench_config(args, runs=args.runs)
    report = run_benchmark(config)
    if config.output_path:
        print(f"wrote {len(report.rows)} checkpoint rows to {config.output_path}", file=sys.stderr)
    else:
        print(report.to_csv(), end="")
    return 0


def cli_main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_bench(args)
    except GnrpaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
