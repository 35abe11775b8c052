"""Benchmark harness: repeated seeded runs, checkpoint statistics, CSV.

Each benchmark executes ``runs`` independent searches with consecutive
seeds, samples every run's best-so-far score at a list of checkpoints, and
reports mean and 95% confidence half-width (``2 * sigma / sqrt(n)``, sample
standard deviation) per checkpoint.

Checkpoints live on the budget's own axis: wall-clock budgets use seconds
(default 40.96 doubling up to 655.36), playout-count budgets use playout
counts, which keeps reports bit-reproducible under fixed seeds.  Reported
score values are canonicalized to two decimals so an emitted CSV parses
back to the exact in-memory report.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from . import samegame, tsptw
from .engine import ScoredSequence, SearchParams, run_search
from .errors import ContractError
from .problem import Problem

DEFAULT_CHECKPOINTS = (40.96, 81.92, 163.84, 327.68, 655.36)
VARIANTS = ("nrpa", "gnrpa-beta", "gnrpa-beta-opt")
PROBLEMS = ("tsptw", "samegame")


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark: problem instance, algorithm variant, and repetitions."""

    problem: str
    instance_path: str
    params: SearchParams
    variant: str = "gnrpa-beta"
    runs: int = 20
    checkpoints: Optional[tuple[float, ...]] = None
    output_path: Optional[str] = None
    bias_sign: str = tsptw.BIAS_NEGATED
    zobrist_seed: int = samegame.DEFAULT_ZOBRIST_SEED
    workers: Optional[int] = None

    def __post_init__(self) -> None:
        if self.problem not in PROBLEMS:
            raise ContractError(f"unknown problem {self.problem!r}; expected one of {PROBLEMS}")
        if self.variant not in VARIANTS:
            raise ContractError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.runs < 1:
            raise ContractError(f"runs must be >= 1, got {self.runs}")
        if self.checkpoints is not None:
            if not self.checkpoints:
                raise ContractError("checkpoints must be non-empty when given")
            if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
                raise ContractError(f"checkpoints must be strictly increasing: {self.checkpoints}")

    def resolved_checkpoints(self) -> tuple[float, ...]:
        if self.checkpoints is not None:
            return self.checkpoints
        if self.params.max_playouts is not None:
            return (float(self.params.max_playouts),)
        return DEFAULT_CHECKPOINTS

    def checkpoint_unit(self) -> str:
        return "playouts" if self.params.max_playouts is not None else "time_s"


@dataclass(frozen=True)
class CheckpointStats:
    checkpoint: float
    mean: float
    ci95: float
    n: int


@dataclass(frozen=True)
class BenchmarkReport:
    """Per-checkpoint mean and confidence half-width across runs."""

    rows: tuple[CheckpointStats, ...]
    unit: str
    degenerate_ci: bool = False

    def to_csv(self) -> str:
        lines = [
            "# ci95 = 2*sigma/sqrt(n); sigma = sample standard deviation (n-1 denominator)"
        ]
        if self.degenerate_ci:
            lines.append("# warning: single run; ci95 is degenerate (0)")
        lines.append(f"{self.unit},mean,ci95,n")
        for row in self.rows:
            lines.append(f"{row.checkpoint:.2f},{row.mean:.2f},{row.ci95:.2f},{row.n}")
        return "\n".join(lines) + "\n"


def report_from_csv(text: str) -> BenchmarkReport:
    """Parse a report emitted by :meth:`BenchmarkReport.to_csv`."""
    degenerate = False
    header: Optional[list[str]] = None
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "degenerate" in line:
                degenerate = True
            continue
        if header is None:
            header = line.split(",")
            if len(header) != 4 or header[1:] != ["mean", "ci95", "n"]:
                raise ContractError(f"unexpected CSV header: {line!r}")
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise ContractError(f"unexpected CSV row: {line!r}")
        rows.append(
            CheckpointStats(
                checkpoint=float(fields[0]),
                mean=float(fields[1]),
                ci95=float(fields[2]),
                n=int(fields[3]),
            )
        )
    if header is None:
        raise ContractError("CSV has no header line")
    return BenchmarkReport(rows=tuple(rows), unit=header[0], degenerate_ci=degenerate)


@dataclass(frozen=True)
class RunOutcome:
    """One search run: improvement events on the checkpoint axis, plus the
    final best result and throughput facts."""

    seed: int
    improvements: tuple[tuple[float, float], ...]
    playouts: int
    elapsed: float
    best_score: float
    best_moves: tuple


def load_problem(config: BenchConfig) -> Problem:
    """Build the configured problem from its instance file.

    The plain (``nrpa``) variant disables the domain bias; the two
    generalized variants differ only in which adapt implementation the
    search uses.
    """
    text = Path(config.instance_path).read_text()
    if config.problem == "tsptw":
        instance = tsptw.parse_instance(text)
        sign = tsptw.BIAS_NONE if config.variant == "nrpa" else config.bias_sign
        return tsptw.TsptwProblem(instance, bias_sign=sign)
    board = samegame.parse_board(text)
    return samegame.SameGameProblem(
        board,
        use_bias=config.variant != "nrpa",
        zobrist_seed=config.zobrist_seed,
    )


def _run_one(config: BenchConfig, run_index: int) -> RunOutcome:
    problem = load_problem(config)
    params = replace(config.params, seed=config.params.seed + run_index)
    stamp_playouts = params.max_playouts is not None
    start = time.monotonic()
    improvements: list[tuple[float, float]] = []
    count = 0
    best = -math.inf

    def observe(result: ScoredSequence) -> None:
        nonlocal count, best
        count += 1
        if result.score > best:
            best = result.score
            stamp = float(count) if stamp_playouts else time.monotonic() - start
            improvements.append((stamp, result.score))

    result = run_search(
        problem,
        params,
        use_optimized_adapt=config.variant == "gnrpa-beta-opt",
        on_playout=observe,
    )
    elapsed = time.monotonic() - start
    return RunOutcome(
        seed=params.seed,
        improvements=tuple(improvements),
        playouts=count,
        elapsed=elapsed,
        best_score=result.score,
        best_moves=tuple(result.record.moves),
    )


def execute_runs(config: BenchConfig) -> list[RunOutcome]:
    """Run all repetitions (seeds ``seed + 0 .. seed + runs - 1``).

    Runs are independent engine instances; with more than one worker they
    execute in a process pool and are reassembled in seed order.
    """
    load_problem(config)  # fail fast on unreadable or malformed instances
    workers = config.workers if config.workers is not None else (os.cpu_count() or 1)
    workers = max(1, min(workers, config.runs))
    if workers == 1:
        return [_run_one(config, i) for i in range(config.runs)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_one, config, i) for i in range(config.runs)]
        return [f.result() for f in futures]


def best_so_far(outcome: RunOutcome, checkpoint: float) -> float:
    """The run's best score at the checkpoint (nearest completed playout
    when the first improvement lands after it)."""
    if not outcome.improvements:
        raise ContractError("run completed no playouts")
    value = None
    for stamp, score in outcome.improvements:
        if stamp <= checkpoint:
            value = score
        else:
            break
    if value is None:
        value = outcome.improvements[0][1]
    return value


def _canon(value: float) -> float:
    """Two-decimal canonical form used in reports, so CSV round-trips exactly."""
    return float(f"{value:.2f}")


def aggregate(
    outcomes: list[RunOutcome], checkpoints: tuple[float, ...], unit: str
) -> BenchmarkReport:
    rows = []
    n = len(outcomes)
    for cp in checkpoints:
        values = [best_so_far(o, cp) for o in outcomes]
        mean = sum(values) / n
        if n > 1:
            variance = sum((v - mean) ** 2 for v in values) / (n - 1)
            ci = 2.0 * math.sqrt(variance) / math.sqrt(n)
        else:
            ci = 0.0
        rows.append(
            CheckpointStats(checkpoint=_canon(cp), mean=_canon(mean), ci95=_canon(ci), n=n)
        )
    return BenchmarkReport(rows=tuple(rows), unit=unit, degenerate_ci=(n == 1))


def run_benchmark(config: BenchConfig) -> BenchmarkReport:
    """Execute all runs, aggregate checkpoint statistics, optionally write CSV."""
    outcomes = execute_runs(config)
    report = aggregate(outcomes, config.resolved_checkpoints(), config.checkpoint_unit())
    if config.output_path:
        Path(config.output_path).write_text(report.to_csv())
    return report
