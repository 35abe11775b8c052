"""Softmax playout policies, weight adaptation, and the nested search.

The engine keeps one weight per 64-bit move code.  Playouts sample moves
with probability proportional to ``exp(weight/tau + bias)``; after each
lower-level result, the weights are pulled toward the best sequence found
so far by a cross-entropy gradient step of size ``alpha``.  Nesting the
loop ``levels`` deep gives each level its own private policy copy adapted
toward its own best sequence.

Setting ``tau = 1`` and all biases to 0 recovers the plain algorithm; the
temperature and bias generalization is equivalent to rescaling the learning
rate and initial weights, which the equivalence tests assert end to end.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Optional

from .errors import ContractError, DeadEndError, MalformedRecordError
from .problem import Problem


class Policy:
    """Sparse map from move code to weight; absent codes read as 0.

    Weights stay finite after any number of adapt steps on finite inputs.
    """

    __slots__ = ("weights",)

    def __init__(self, weights: Optional[dict[int, float]] = None) -> None:
        self.weights: dict[int, float] = dict(weights) if weights else {}

    def __getitem__(self, code: int) -> float:
        return self.weights.get(code, 0.0)

    def __setitem__(self, code: int, weight: float) -> None:
        self.weights[code] = float(weight)

    def __len__(self) -> int:
        return len(self.weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Policy):
            return NotImplemented
        for code in self.weights.keys() | other.weights.keys():
            if self.weights.get(code, 0.0) != other.weights.get(code, 0.0):
                return False
        return True

    def __repr__(self) -> str:
        return f"Policy({len(self.weights)} weights)"

    def copy(self) -> "Policy":
        out = Policy.__new__(Policy)
        out.weights = dict(self.weights)
        return out


@dataclass(frozen=True)
class SearchParams:
    """Knobs of one search run.

    Exactly one of ``max_seconds`` / ``max_playouts`` may be set; neither
    means the search runs its full ``iterations ** levels`` schedule.
    """

    alpha: float = 1.0
    tau: float = 1.0
    iterations: int = 100
    levels: int = 2
    max_seconds: Optional[float] = None
    max_playouts: Optional[int] = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ContractError(f"alpha must be a positive finite real, got {self.alpha}")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ContractError(f"tau must be a positive finite real, got {self.tau}")
        if self.iterations < 1:
            raise ContractError(f"iterations must be >= 1, got {self.iterations}")
        if self.levels < 0:
            raise ContractError(f"levels must be >= 0, got {self.levels}")
        if self.max_seconds is not None and self.max_playouts is not None:
            raise ContractError("at most one of max_seconds / max_playouts may be set")
        if self.max_seconds is not None and not self.max_seconds > 0:
            raise ContractError(f"max_seconds must be > 0, got {self.max_seconds}")
        if self.max_playouts is not None and self.max_playouts < 1:
            raise ContractError(f"max_playouts must be >= 1, got {self.max_playouts}")


class PlayoutStep(NamedTuple):
    """One decision of a playout: the move codes and biases that were legal,
    and the index of the sampled move."""

    codes: list[int]
    biases: list[float]
    chosen: int


@dataclass
class PlayoutRecord:
    """Everything adapt needs to re-derive per-step probabilities without
    re-generating moves: codes, biases, and the chosen index per step, plus
    the sampled moves and the terminal score."""

    steps: list[PlayoutStep] = field(default_factory=list)
    moves: list[Any] = field(default_factory=list)
    score: float = 0.0


class ScoredSequence(NamedTuple):
    score: float
    record: PlayoutRecord


def move_probabilities(weights: list[float], biases: list[float], tau: float) -> list[float]:
    """Softmax over ``weights[k]/tau + biases[k]``, overflow-safe.

    The largest exponent is subtracted before exponentiation, which leaves
    the distribution unchanged but keeps ``exp`` in range for any finite
    inputs.  Raises :class:`ContractError` on empty or mismatched lists,
    non-positive ``tau``, or non-finite entries.
    """
    if not weights:
        raise ContractError("move_probabilities requires at least one move")
    if len(weights) != len(biases):
        raise ContractError(
            f"weights and biases differ in length: {len(weights)} vs {len(biases)}"
        )
    if not (tau > 0 and math.isfinite(tau)):
        raise ContractError(f"tau must be a positive finite real, got {tau}")
    args = []
    for w, b in zip(weights, biases):
        if not (math.isfinite(w) and math.isfinite(b)):
            raise ContractError(f"non-finite weight or bias: {w}, {b}")
        args.append(w / tau + b)
    top = max(args)
    exps = [math.exp(a - top) for a in args]
    z = sum(exps)
    return [e / z for e in exps]


def _step_exps(
    weights: dict[int, float], codes: list[int], biases: list[float], tau: float
) -> tuple[list[float], float]:
    """Unnormalized move preferences ``exp(w/tau + b)`` of one decision.

    Shared by the playout and both adapt variants so they agree bit for bit.
    Max-subtraction scales every entry and the sum by the same factor, so
    the probabilities ``exps[k] / z`` are unaffected.
    """
    get = weights.get
    args = [get(c, 0.0) / tau + b for c, b in zip(codes, biases)]
    top = max(args)
    exps = [math.exp(a - top) for a in args]
    return exps, sum(exps)


def playout(
    problem: Problem, policy: Policy, tau: float, rng: random.Random
) -> ScoredSequence:
    """Run one episode, sampling each move from the softmax policy.

    Records the codes, biases, and chosen index of every decision so that
    adapt never has to re-generate legal moves.  Exactly one uniform draw is
    consumed per decision (even for single-move decisions), which keeps
    whole runs reproducible and comparable across equivalent configurations.
    """
    weights = policy.weights
    state = problem.initial_state()
    steps: list[PlayoutStep] = []
    moves: list[Any] = []
    is_terminal = problem.is_terminal
    legal_moves = problem.legal_moves
    play = problem.play
    while not is_terminal(state):
        descriptors = legal_moves(state)
        if not descriptors:
            raise DeadEndError(
                f"non-terminal state with no legal moves after {len(moves)} moves"
            )
        codes = [d.code for d in descriptors]
        biases = [d.bias for d in descriptors]
        exps, z = _step_exps(weights, codes, biases, tau)
        u = rng.random() * z
        acc = 0.0
        chosen = len(exps) - 1
        for k, e in enumerate(exps):
            acc += e
            if u < acc:
                chosen = k
                break
        move = descriptors[chosen].move
        steps.append(PlayoutStep(codes, biases, chosen))
        moves.append(move)
        state = play(state, move)
    score = problem.score(state)
    return ScoredSequence(score, PlayoutRecord(steps=steps, moves=moves, score=score))


def _check_step(step: PlayoutStep) -> None:
    n = len(step.codes)
    if len(step.biases) != n:
        raise MalformedRecordError(
            f"step has {n} codes but {len(step.biases)} biases"
        )
    if not 0 <= step.chosen < n:
        raise MalformedRecordError(
            f"chosen index {step.chosen} out of range for {n} moves"
        )


def _apply_gradient(
    target: dict[int, float],
    codes: list[int],
    chosen: int,
    exps: list[float],
    z: float,
    coef: float,
) -> None:
    """Subtract ``coef * (p - delta)`` from each code's weight in ``target``.

    Updates accumulate when the same code occurs more than once.
    """
    for j, c in enumerate(codes):
        g = exps[j] / z
        if j == chosen:
            g -= 1.0
        target[c] = target.get(c, 0.0) - coef * g


def adapt(policy: Policy, record: PlayoutRecord, alpha: float, tau: float) -> Policy:
    """Pull weights toward the recorded sequence; returns a new policy.

    Batch semantics: every step's probabilities are computed from the input
    policy, and the gradient is applied to a temporary copy, so updates from
    earlier steps never feed into later steps' probabilities.  The input
    policy is left untouched.
    """
    base = policy.weights
    target = dict(base)
    coef = alpha / tau
    for step in record.steps:
        _check_step(step)
        exps, z = _step_exps(base, step.codes, step.biases, tau)
        _apply_gradient(target, step.codes, step.chosen, exps, z, coef)
    out = Policy.__new__(Policy)
    out.weights = target
    return out


def adapt_optimized(
    policy: Policy, record: PlayoutRecord, alpha: float, tau: float
) -> None:
    """Same update as :func:`adapt`, in place and without copying the map.

    All per-step preferences are computed from the unmodified policy first;
    the gradient is then applied directly.  The resulting weights are
    identical to :func:`adapt`'s output, but on large policies this skips a
    full map copy per call, which is the dominant cost for domains with many
    distinct move codes.
    """
    weights = policy.weights
    coef = alpha / tau
    precomputed = []
    for step in record.steps:
        _check_step(step)
        precomputed.append(_step_exps(weights, step.codes, step.biases, tau))
    for step, (exps, z) in zip(record.steps, precomputed):
        _apply_gradient(weights, step.codes, step.chosen, exps, z, coef)


class _Budget:
    """Shared playout-count or wall-clock limit for one search run."""

    __slots__ = ("max_playouts", "deadline", "playouts")

    def __init__(
        self, max_playouts: Optional[int] = None, max_seconds: Optional[float] = None
    ) -> None:
        self.max_playouts = max_playouts
        self.deadline = (
            time.monotonic() + max_seconds if max_seconds is not None else None
        )
        self.playouts = 0

    def exhausted(self) -> bool:
        if self.max_playouts is not None and self.playouts >= self.max_playouts:
            return True
        if self.deadline is not None and time.monotonic() >= self.deadline:
            return True
        return False


def gnrpa(
    level: int,
    policy: Policy,
    problem: Problem,
    params: SearchParams,
    rng: random.Random,
    *,
    use_optimized_adapt: bool = False,
    on_playout: Optional[Callable[[ScoredSequence], None]] = None,
    _budget: Optional[_Budget] = None,
) -> ScoredSequence:
    """Recursive nested search.

    Level 0 performs one playout.  Level L copies the incoming policy, runs
    ``params.iterations`` iterations of level L-1 on the copy, keeps the
    best result (ties refresh the stored sequence, so an equal-scoring later
    sequence replaces the earlier one), and adapts the copy toward the best
    record after every iteration.  When the budget runs out the loop aborts
    cleanly and the best result found so far is returned; each level still
    completes at least one iteration, so with a wall-clock budget the search
    can overshoot the deadline by at most one playout per level.
    """
    if _budget is None:
        _budget = _Budget(params.max_playouts, params.max_seconds)
    if level == 0:
        result = playout(problem, policy, params.tau, rng)
        _budget.playouts += 1
        if on_playout is not None:
            on_playout(result)
        return result
    pol = policy.copy()
    best: Optional[ScoredSequence] = None
    for _ in range(params.iterations):
        if best is not None and _budget.exhausted():
            break
        result = gnrpa(
            level - 1,
            pol,
            problem,
            params,
            rng,
            use_optimized_adapt=use_optimized_adapt,
            on_playout=on_playout,
            _budget=_budget,
        )
        if best is None or result.score >= best.score:
            best = result
        if use_optimized_adapt:
            adapt_optimized(pol, best.record, params.alpha, params.tau)
        else:
            pol = adapt(pol, best.record, params.alpha, params.tau)
    assert best is not None
    return best


def run_search(
    problem: Problem,
    params: SearchParams,
    *,
    policy: Optional[Policy] = None,
    use_optimized_adapt: bool = False,
    on_playout: Optional[Callable[[ScoredSequence], None]] = None,
) -> ScoredSequence:
    """Seed an RNG from ``params.seed`` and run the full nested search.

    ``policy`` provides initial weights (it is copied, not mutated); by
    default all weights start at 0.
    """
    rng = random.Random(params.seed)
    pol = policy.copy() if policy is not None else Policy()
    return gnrpa(
        params.levels,
        pol,
        problem,
        params,
        rng,
        use_optimized_adapt=use_optimized_adapt,
        on_playout=on_playout,
    )


def gradient_oracle(
    weights: list[float],
    biases: list[float],
    tau: float,
    best: int,
    eps: float = 1e-5,
) -> list[float]:
    """Central finite difference of ``-log p_best`` with respect to each weight.

    Test instrument: certifies the adapt update against the loss it claims
    to descend, without sharing any code with the update itself.  Raises
    :class:`ContractError` when ``p_best`` underflows to 0 (pick less
    degenerate test points) or ``best`` is out of range.
    """
    if not 0 <= best < len(weights):
        raise ContractError(f"best index {best} out of range for {len(weights)} moves")

    def loss(ws: list[float]) -> float:
        p = move_probabilities(ws, biases, tau)[best]
        if p <= 0.0:
            raise ContractError("p_best underflowed to 0; gradient oracle undefined")
        return -math.log(p)

    grad = []
    for k in range(len(weights)):
        up = list(weights)
        up[k] += eps
        down = list(weights)
        down[k] -= eps
        grad.append((loss(up) - loss(down)) / (2.0 * eps))
    return grad
