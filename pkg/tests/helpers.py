"""Generators and independent oracles shared across the test suite.

The oracles deliberately re-derive everything from the stated rules with
their own representations (permutation walks, column-tuple boards) so they
share no code with the implementations they check.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from gnrpa.engine import Policy
from gnrpa.problem import MoveDescriptor, Problem
from gnrpa.tsptw import TsptwInstance, parse_instance

PENALTY = 1_000_000.0


# --- tiny deterministic domains for engine structure tests -----------------


class LineProblem(Problem):
    """states 0..depth; two moves per state; score = count of 1-moves."""

    def __init__(self, depth: int = 5):
        self.depth = depth

    def initial_state(self):
        return (0, 0)

    def is_terminal(self, state):
        return state[0] >= self.depth

    def legal_moves(self, state):
        pos = state[0]
        return [
            MoveDescriptor(move=0, code=pos * 2, bias=0.0),
            MoveDescriptor(move=1, code=pos * 2 + 1, bias=0.0),
        ]

    def play(self, state, move):
        return (state[0] + 1, state[1] + move)

    def score(self, state):
        return float(state[1])


class ConstantScoreProblem(LineProblem):
    """Same move structure, but every playout scores the same."""

    def score(self, state):
        return 1.0


class SingleMoveProblem(Problem):
    """Exactly one legal move everywhere; the playout is forced."""

    def __init__(self, depth: int = 4):
        self.depth = depth

    def initial_state(self):
        return 0

    def is_terminal(self, state):
        return state >= self.depth

    def legal_moves(self, state):
        return [MoveDescriptor(move="step", code=state, bias=0.5)]

    def play(self, state, move):
        return state + 1

    def score(self, state):
        return 7.0


class DeadEndProblem(Problem):
    """Non-terminal state with no legal moves (domain-contract breach)."""

    def initial_state(self):
        return 0

    def is_terminal(self, state):
        return False

    def legal_moves(self, state):
        return []

    def play(self, state, move):
        raise AssertionError("unreachable")

    def score(self, state):
        raise AssertionError("unreachable")


# --- TSPTW generators and brute-force oracle --------------------------------


def tsptw_text(nodes: list[tuple]) -> str:
    """Format (id, x, y, demand, ready, due, service) rows as instance text."""
    return "\n".join(" ".join(str(v) for v in row) for row in nodes)


def random_tsptw_text(
    seed: int,
    n_customers: int,
    *,
    coord_range: float = 100.0,
    window_width: tuple[float, float] = (40.0, 160.0),
    loose_fraction: float = 0.3,
    service_max: float = 5.0,
) -> str:
    """Random instance whose windows are centered on a hidden reference
    tour's arrival times, so at least one zero-violation tour exists; the
    width range controls how constrained the instance is."""
    rng = random.Random(seed)
    points = [(coord_range / 2, coord_range / 2)]
    points += [
        (rng.uniform(0, coord_range), rng.uniform(0, coord_range))
        for _ in range(n_customers)
    ]
    services = [0.0] + [rng.uniform(0, service_max) for _ in range(n_customers)]
    order = list(range(1, n_customers + 1))
    rng.shuffle(order)

    def dist(a, b):
        return ((points[a][0] - points[b][0]) ** 2 + (points[a][1] - points[b][1]) ** 2) ** 0.5

    arrivals = {}
    t = 0.0
    cur = 0
    for j in order:
        t += dist(cur, j)
        arrivals[j] = t
        t += services[j]
        cur = j
    t += dist(cur, 0)
    horizon = t + window_width[1] * (n_customers + 1)

    rows = [(0, points[0][0], points[0][1], 0, 0.0, horizon, 0.0)]
    for j in range(1, n_customers + 1):
        if rng.random() < loose_fraction:
            ready, due = 0.0, horizon
        else:
            width = rng.uniform(*window_width)
            ready = max(0.0, arrivals[j] - width / 2)
            due = arrivals[j] + width / 2
        rows.append((j, points[j][0], points[j][1], 0, ready, due, services[j]))
    return tsptw_text(rows)


def random_tsptw_instance(seed: int, n_customers: int, **kwargs) -> TsptwInstance:
    return parse_instance(random_tsptw_text(seed, n_customers, **kwargs))


def wide_window_tsptw_text(seed: int, n_customers: int, coord_range: float = 100.0) -> str:
    """Pure-TSP toy: every window is the whole horizon."""
    rng = random.Random(seed)
    rows = [(0, coord_range / 2, coord_range / 2, 0, 0.0, 1e6, 0.0)]
    for j in range(1, n_customers + 1):
        rows.append((j, rng.uniform(0, coord_range), rng.uniform(0, coord_range), 0, 0.0, 1e6, 0.0))
    return tsptw_text(rows)


def tour_score(instance: TsptwInstance, perm: tuple[int, ...]) -> float:
    """Independent walk of one customer permutation (depot-start,
    depot-end): wait when early, count a violation when late, negate the
    penalized cost."""
    nodes = instance.nodes
    d = instance.distances
    t = nodes[0].ready
    cur = 0
    cost = 0.0
    violations = 0
    for j in list(perm) + [0]:
        leg = float(d[cur, j])
        cost += leg
        arrival = t + leg
        if arrival > nodes[j].due:
            violations += 1
        t = max(arrival, nodes[j].ready) + nodes[j].service
        cur = j
    return -(cost + PENALTY * violations)


def brute_force_tsptw(instance: TsptwInstance) -> tuple[float, tuple[int, ...]]:
    """Exhaustive enumeration of all customer permutations."""
    customers = range(1, instance.n)
    best_score = -float("inf")
    best_perm: tuple[int, ...] = ()
    for perm in itertools.permutations(customers):
        s = tour_score(instance, perm)
        if s > best_score:
            best_score = s
            best_perm = perm
    return best_score, best_perm


def zero_bias_initial_policy(instance: TsptwInstance, tau: float, sign: str) -> Policy:
    """Weights that fold the distance bias into the initial policy:
    ``w0[code(i, j)] = tau * bias(i, j)``."""
    from gnrpa.tsptw import tsptw_bias

    n = instance.n
    weights = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                weights[i * n + j] = tau * tsptw_bias(instance, i, j, sign)
    return Policy(weights)


# --- SameGame generators and oracles ----------------------------------------


def random_board_text(seed: int, height: int, width: int, colors: int) -> str:
    rng = random.Random(seed)
    return "\n".join(
        " ".join(str(rng.randint(1, colors)) for _ in range(width)) for _ in range(height)
    )


def grid_to_columns(grid: np.ndarray) -> tuple[tuple[int, ...], ...]:
    """Column-tuple view of a grid: per column, colors bottom to top,
    empties dropped; empty columns dropped.  The oracles below work on this
    representation exclusively."""
    h, w = grid.shape
    cols = []
    for c in range(w):
        col = tuple(int(grid[r, c]) for r in range(h - 1, -1, -1) if grid[r, c] != 0)
        if col:
            cols.append(col)
    return tuple(cols)


def column_groups(cols: tuple[tuple[int, ...], ...]):
    """Connected monochrome components (>= 2 cells) of a column-tuple board.

    Cells are (column, height) pairs; neighbors share a column and adjacent
    heights, or the same height in adjacent columns.
    """
    cells = {(c, h): color for c, col in enumerate(cols) for h, color in enumerate(col)}
    seen = set()
    groups = []
    for cell in sorted(cells):
        if cell in seen:
            continue
        color = cells[cell]
        component = []
        frontier = [cell]
        seen.add(cell)
        while frontier:
            (c, h) = frontier.pop()
            component.append((c, h))
            for nb in ((c - 1, h), (c + 1, h), (c, h - 1), (c, h + 1)):
                if nb not in seen and cells.get(nb) == color:
                    seen.add(nb)
                    frontier.append(nb)
        if len(component) >= 2:
            groups.append((color, frozenset(component)))
    return groups


def remove_from_columns(
    cols: tuple[tuple[int, ...], ...], cells: frozenset[tuple[int, int]]
) -> tuple[tuple[int, ...], ...]:
    out = []
    for c, col in enumerate(cols):
        kept = tuple(color for h, color in enumerate(col) if (c, h) not in cells)
        if kept:
            out.append(kept)
    return tuple(out)


def dfs_best_score(grid: np.ndarray, clear_bonus: int = 1000) -> int:
    """Exhaustive memoized search over all move sequences; returns the best
    achievable total with (n-2)^2 per move plus the clear bonus."""
    memo: dict[tuple, int] = {}

    def value(cols: tuple[tuple[int, ...], ...]) -> int:
        if not cols:
            return 0
        cached = memo.get(cols)
        if cached is not None:
            return cached
        best = 0
        for color, cells in column_groups(cols):
            rest = remove_from_columns(cols, cells)
            gained = (len(cells) - 2) ** 2
            if not rest:
                gained += clear_bonus
            total = gained + value(rest)
            if total > best:
                best = total
        memo[cols] = best
        return best

    return value(grid_to_columns(grid))


def independent_groups(grid: np.ndarray) -> set[tuple[int, frozenset[tuple[int, int]]]]:
    """Second flood fill on (row, col) coordinates, for cross-checking the
    kernel-based group finder."""
    h, w = grid.shape
    seen = set()
    out = set()
    for r in range(h):
        for c in range(w):
            color = int(grid[r, c])
            if color == 0 or (r, c) in seen:
                continue
            component = []
            frontier = [(r, c)]
            seen.add((r, c))
            while frontier:
                rr, cc = frontier.pop()
                component.append((rr, cc))
                for nr, nc in ((rr - 1, cc), (rr + 1, cc), (rr, cc - 1), (rr, cc + 1)):
                    if (
                        0 <= nr < h
                        and 0 <= nc < w
                        and (nr, nc) not in seen
                        and int(grid[nr, nc]) == color
                    ):
                        seen.add((nr, nc))
                        frontier.append((nr, nc))
            if len(component) >= 2:
                out.add((color, frozenset(component)))
    return out
