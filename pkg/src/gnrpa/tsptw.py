"""Traveling salesman with time windows.

A tour starts at the depot (node 0), visits every customer once, and
returns to the depot.  Early arrival waits until the window opens; late
arrival counts one soft violation and continues.  The engine maximizes, so
the score is the negated penalized cost ``-(distance + 1e6 * violations)``:
the penalty constant is large enough that the search always prefers fixing
a violation over any distance saving.

Each directed leg ``i -> j`` has its own move code (``i * n + j``, collision
free) and a bias derived from the normalized distance, so short legs are
favored from the very first playout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ContractError, IllegalMoveError, ParseError
from .problem import MoveDescriptor, Problem

PENALTY = 1_000_000.0

BIAS_NEGATED = "negated"  # near cities favored: beta in [-10, 0]
BIAS_LITERAL = "literal"  # far cities favored: beta in [0, 10]
BIAS_NONE = "none"


class TsptwNode(NamedTuple):
    id: int
    x: float
    y: float
    ready: float
    due: float
    service: float


@dataclass(frozen=True)
class TsptwInstance:
    """Parsed instance: nodes, dense Euclidean distance matrix, and the
    off-diagonal distance range used for bias normalization."""

    nodes: tuple[TsptwNode, ...]
    distances: np.ndarray
    dmin: float
    dmax: float

    @property
    def n(self) -> int:
        return len(self.nodes)


class TsptwState(NamedTuple):
    """Partial tour: current node, visited set (bitmask), clock, violation
    count so far, and accumulated distance."""

    current: int
    visited: int
    time: float
    violations: int
    distance: float


def visited_nodes(state: TsptwState) -> frozenset[int]:
    """The visited bitmask as a set of node indices."""
    return frozenset(i for i in range(state.visited.bit_length()) if state.visited >> i & 1)


def parse_instance(text: str) -> TsptwInstance:
    """Parse whitespace-separated node lines.

    Each non-blank line holds ``id x y demand ready due service``; the
    demand column is ignored (single vehicle, no capacity).  The first node
    is the depot.  Raises :class:`ParseError` with the offending line number
    on malformed input, fewer than two nodes, or ``ready > due``.
    """
    nodes: list[TsptwNode] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 7:
            raise ParseError(
                f"line {lineno}: expected 7 fields (id x y demand ready due service), "
                f"got {len(fields)}"
            )
        try:
            node_id = int(float(fields[0]))
            x, y = float(fields[1]), float(fields[2])
            ready, due, service = float(fields[4]), float(fields[5]), float(fields[6])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: non-numeric field: {exc}") from None
        if not all(map(math.isfinite, (x, y, ready, due, service))):
            raise ParseError(f"line {lineno}: non-finite value")
        if ready > due:
            raise ParseError(f"line {lineno}: ready {ready} exceeds due {due}")
        nodes.append(TsptwNode(node_id, x, y, ready, due, service))
    if len(nodes) < 2:
        raise ParseError(f"need at least 2 nodes, got {len(nodes)}")
    xy = np.array([(nd.x, nd.y) for nd in nodes], dtype=np.float64)
    diff = xy[:, None, :] - xy[None, :, :]
    distances = np.hypot(diff[:, :, 0], diff[:, :, 1])
    off_diag = distances[~np.eye(len(nodes), dtype=bool)]
    return TsptwInstance(
        nodes=tuple(nodes),
        distances=distances,
        dmin=float(off_diag.min()),
        dmax=float(off_diag.max()),
    )


def tsptw_bias(instance: TsptwInstance, i: int, j: int, sign: str = BIAS_NEGATED) -> float:
    """Distance-normalized bias of the leg ``i -> j``.

    ``10 * (d - dmin) / (dmax - dmin)``, negated by default so that short
    legs get the higher softmax preference; ``sign="literal"`` keeps the
    positive form.  Degenerate instances (all distances equal) get 0.
    """
    if i == j:
        raise ContractError("bias of a self-loop is undefined")
    if instance.dmax == instance.dmin:
        return 0.0
    scaled = 10.0 * (instance.distances[i, j] - instance.dmin) / (instance.dmax - instance.dmin)
    return -scaled if sign == BIAS_NEGATED else scaled


def tsptw_step(instance: TsptwInstance, state: TsptwState, nxt: int) -> TsptwState:
    """Travel to node ``nxt``: wait if early, count a violation if late,
    then serve.  The due-date check applies to the arrival time, before
    service.  Raises :class:`IllegalMoveError` on a revisit (the depot may
    only be revisited once every customer is done)."""
    n = instance.n
    if not 0 <= nxt < n:
        raise IllegalMoveError(f"node {nxt} out of range")
    full = (1 << n) - 1
    if nxt == 0:
        if state.visited != full or state.current == 0:
            raise IllegalMoveError("depot revisited before all customers were served")
    elif state.visited >> nxt & 1:
        raise IllegalMoveError(f"node {nxt} already visited")
    node = instance.nodes[nxt]
    d = float(instance.distances[state.current, nxt])
    arrival = state.time + d
    late = 1 if arrival > node.due else 0
    departure = max(arrival, node.ready) + node.service
    return TsptwState(
        current=nxt,
        visited=state.visited | (1 << nxt),
        time=departure,
        violations=state.violations + late,
        distance=state.distance + d,
    )


def is_tour_complete(instance: TsptwInstance, state: TsptwState) -> bool:
    return state.visited == (1 << instance.n) - 1 and state.current == 0


def tsptw_score(instance: TsptwInstance, state: TsptwState) -> float:
    """Negated penalized tour cost of a completed tour."""
    if not is_tour_complete(instance, state):
        raise ContractError("score queried on an incomplete tour")
    return -(state.distance + PENALTY * state.violations)


class TsptwProblem(Problem):
    """Search-engine adapter for one instance.

    Moves are destination node indices.  Descriptors (code and bias per
    directed leg) are precomputed once, so generating legal moves is just a
    visited-mask scan.  ``bias_sign`` selects the bias convention
    (``"negated"`` default, ``"literal"``, or ``"none"`` for the plain
    unbiased algorithm).
    """

    def __init__(self, instance: TsptwInstance, bias_sign: str = BIAS_NEGATED) -> None:
        if bias_sign not in (BIAS_NEGATED, BIAS_LITERAL, BIAS_NONE):
            raise ContractError(f"unknown bias sign {bias_sign!r}")
        self.instance = instance
        self.bias_sign = bias_sign
        n = instance.n
        self._full = (1 << n) - 1
        self._descriptors = [
            [
                MoveDescriptor(
                    move=j,
                    code=i * n + j,
                    bias=0.0 if bias_sign == BIAS_NONE or i == j else tsptw_bias(instance, i, j, bias_sign),
                )
                for j in range(n)
            ]
            for i in range(n)
        ]

    def initial_state(self) -> TsptwState:
        return TsptwState(
            current=0,
            visited=1,
            time=float(self.instance.nodes[0].ready),
            violations=0,
            distance=0.0,
        )

    def is_terminal(self, state: TsptwState) -> bool:
        return state.visited == self._full and state.current == 0

    def legal_moves(self, state: TsptwState) -> list[MoveDescriptor]:
        row = self._descriptors[state.current]
        visited = state.visited
        out = [row[j] for j in range(1, self.instance.n) if not visited >> j & 1]
        if not out:
            out = [row[0]]
        return out

    def play(self, state: TsptwState, move: int) -> TsptwState:
        return tsptw_step(self.instance, state, move)

    def score(self, state: TsptwState) -> float:
        return tsptw_score(self.instance, state)
