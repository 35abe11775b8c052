"""SameGame board mechanics and its search-engine adapter.

A move removes a 4-connected monochrome group of at least two cells; the
cells above fall down, and emptied columns close up to the left.  Removing
``n`` cells scores ``(n - 2) ** 2``, clearing the whole board adds 1000, and
leftovers cost nothing.

Move codes hash the removed cells with per-(cell, color) random 64-bit
values, so the same group keeps its code wherever it appears in the search.
The playout policy avoids groups of the board's dominant color (they are
worth hoarding into one big group), except pairs late in the game, and the
bias prefers bigger groups while discouraging dominant pairs.

The hot paths (group detection, selection, hashing, gravity/compaction) are
numba-compiled array kernels; the object API on top of them is what tests
and callers use.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .errors import ContractError, IllegalMoveError, ParseError
from .problem import MoveDescriptor, Problem

DEFAULT_ZOBRIST_SEED = 0x53474D45
CLEAR_BONUS = 1000
DEFAULT_COLORS = 5
SIZE_TWO_AFTER = 10


class Group(NamedTuple):
    """A removable group: its cells (sorted ``(row, col)`` pairs) and color."""

    cells: tuple[tuple[int, int], ...]
    color: int

    @property
    def size(self) -> int:
        return len(self.cells)


class Board:
    """Immutable-by-convention board state.

    ``grid`` is an ``(H, W)`` int8 array, 0 for empty, colors from 1 up;
    row 0 is the top, gravity pulls toward row ``H - 1``.  ``dominant`` is
    fixed from the initial position and carried through moves.
    """

    __slots__ = ("grid", "dominant", "move_number", "accumulated_score")

    def __init__(
        self,
        grid: np.ndarray,
        dominant: int,
        move_number: int = 0,
        accumulated_score: int = 0,
    ) -> None:
        self.grid = grid
        self.dominant = dominant
        self.move_number = move_number
        self.accumulated_score = accumulated_score

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Board):
            return NotImplemented
        return (
            np.array_equal(self.grid, other.grid)
            and self.dominant == other.dominant
            and self.move_number == other.move_number
            and self.accumulated_score == other.accumulated_score
        )

    def __repr__(self) -> str:
        return (
            f"Board({self.height}x{self.width}, move {self.move_number}, "
            f"score {self.accumulated_score})"
        )


@dataclass(frozen=True)
class ZobristTable:
    """Per-(cell, color) random 64-bit values, reproducible from a seed."""

    table: np.ndarray  # (height * width, num_colors + 1) uint64
    seed: int
    height: int
    width: int


def make_zobrist_table(
    height: int, width: int, num_colors: int = DEFAULT_COLORS, seed: int = DEFAULT_ZOBRIST_SEED
) -> ZobristTable:
    rng = random.Random(seed)
    table = np.empty((height * width, num_colors + 1), dtype=np.uint64)
    for cell in range(height * width):
        for color in range(num_colors + 1):
            table[cell, color] = rng.getrandbits(64)
    return ZobristTable(table=table, seed=seed, height=height, width=width)


# --- array kernels ---------------------------------------------------------


@njit(cache=True)
def _flood_groups(grid):
    """All maximal 4-connected monochrome components of size >= 2.

    Groups appear in row-major order of their first cell; cells within a
    group in flood order.  Returns (colors, sizes, offsets, cells) with
    cells as flat indices and offsets of length ngroups + 1.
    """
    H, W = grid.shape
    ncells = H * W
    visited = np.zeros(ncells, np.uint8)
    max_groups = ncells // 2 + 1
    colors = np.empty(max_groups, np.int8)
    sizes = np.empty(max_groups, np.int32)
    offsets = np.empty(max_groups + 1, np.int32)
    cells = np.empty(ncells, np.int32)
    stack = np.empty(ncells, np.int32)
    ng = 0
    cursor = 0
    for r in range(H):
        for c in range(W):
            color = grid[r, c]
            idx = r * W + c
            if color == 0 or visited[idx]:
                continue
            visited[idx] = 1
            stack[0] = idx
            sp = 1
            size = 0
            while sp > 0:
                sp -= 1
                f = stack[sp]
                cells[cursor + size] = f
                size += 1
                fr = f // W
                fc = f % W
                if fr > 0 and grid[fr - 1, fc] == color and not visited[f - W]:
                    visited[f - W] = 1
                    stack[sp] = f - W
                    sp += 1
                if fr + 1 < H and grid[fr + 1, fc] == color and not visited[f + W]:
                    visited[f + W] = 1
                    stack[sp] = f + W
                    sp += 1
                if fc > 0 and grid[fr, fc - 1] == color and not visited[f - 1]:
                    visited[f - 1] = 1
                    stack[sp] = f - 1
                    sp += 1
                if fc + 1 < W and grid[fr, fc + 1] == color and not visited[f + 1]:
                    visited[f + 1] = 1
                    stack[sp] = f + 1
                    sp += 1
            if size >= 2:
                colors[ng] = color
                sizes[ng] = size
                offsets[ng] = cursor
                cursor += size
                ng += 1
            # size-1 components are simply skipped; cursor stays put
    offsets[ng] = cursor
    return colors[:ng], sizes[:ng], offsets[: ng + 1], cells[:cursor]


@njit(cache=True)
def _moves_kernel(grid, table, dominant, selective, allow_tabu_pairs, use_bias):
    """Selected groups with their hash codes and biases, ready for playout.

    Selection drops dominant-color groups (pairs are exempt when
    ``allow_tabu_pairs``); if that drops everything although groups exist,
    the unfiltered list is returned so playouts never stall.
    """
    colors, sizes, offsets, cells = _flood_groups(grid)
    ng = len(colors)
    keep = np.ones(ng, np.uint8)
    if selective and ng > 0:
        kept_any = False
        for g in range(ng):
            ok = colors[g] != dominant or (sizes[g] == 2 and allow_tabu_pairs)
            keep[g] = 1 if ok else 0
            kept_any = kept_any or ok
        if not kept_any:
            for g in range(ng):
                keep[g] = 1
    k = 0
    total = 0
    for g in range(ng):
        if keep[g]:
            k += 1
            total += sizes[g]
    out_colors = np.empty(k, np.int8)
    out_sizes = np.empty(k, np.int32)
    out_codes = np.empty(k, np.uint64)
    out_biases = np.empty(k, np.float64)
    out_offsets = np.empty(k + 1, np.int32)
    out_cells = np.empty(total, np.int32)
    o = 0
    cursor = 0
    for g in range(ng):
        if not keep[g]:
            continue
        color = colors[g]
        size = sizes[g]
        code = np.uint64(0)
        for t in range(offsets[g], offsets[g] + size):
            f = cells[t]
            out_cells[cursor] = f
            cursor += 1
            code ^= table[f, color]
        out_colors[o] = color
        out_sizes[o] = size
        out_codes[o] = code
        out_offsets[o] = cursor - size
        if use_bias:
            tabu = 1 if (size == 2 and color == dominant) else 0
            b = size - 2 - tabu
            if b > 8:
                b = 8
            out_biases[o] = float(b)
        else:
            out_biases[o] = 0.0
        o += 1
    out_offsets[k] = cursor
    return out_colors, out_sizes, out_codes, out_biases, out_offsets, out_cells


@njit(cache=True)
def _apply_kernel(grid, removed):
    """Remove the given flat cells, apply gravity, close empty columns."""
    H, W = grid.shape
    out = grid.copy()
    for f in removed:
        out[f // W, f % W] = 0
    for c in range(W):
        w = H - 1
        for r in range(H - 1, -1, -1):
            v = out[r, c]
            if v != 0:
                out[w, c] = v
                w -= 1
        for r in range(w, -1, -1):
            out[r, c] = 0
    wcol = 0
    for c in range(W):
        if out[H - 1, c] != 0:
            if wcol != c:
                for r in range(H):
                    out[r, wcol] = out[r, c]
            wcol += 1
    for c in range(wcol, W):
        for r in range(H):
            out[r, c] = 0
    return out


# --- object API ------------------------------------------------------------


def dominant_color(grid: np.ndarray) -> int:
    """Most frequent color, ties broken by the smallest color id; 0 when
    the grid is empty."""
    counts = np.bincount(grid.ravel().astype(np.int64))
    if len(counts) <= 1 or counts[1:].max() == 0:
        return 0
    return int(counts[1:].argmax()) + 1


def parse_board(text: str, num_colors: int = DEFAULT_COLORS) -> Board:
    """Parse rows of digit tokens into a board.

    Lines hold whitespace-separated color digits (0 for an empty cell);
    rows must be rectangular.  The dominant color is fixed from the parsed
    position.
    """
    rows: list[list[int]] = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row = []
        for token in line.split():
            try:
                value = int(token)
            except ValueError:
                raise ParseError(f"line {lineno}: invalid color token {token!r}") from None
            if not 0 <= value <= num_colors:
                raise ParseError(
                    f"line {lineno}: color {value} outside 0..{num_colors}"
                )
            row.append(value)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(
                f"line {lineno}: ragged row ({len(row)} cells, expected {width})"
            )
        rows.append(row)
    if not rows or width == 0:
        raise ParseError("empty board")
    grid = np.array(rows, dtype=np.int8)
    return Board(grid, dominant_color(grid))


def find_groups(board: Board) -> list[Group]:
    """All removable groups (size >= 2), in deterministic scan order."""
    colors, sizes, offsets, cells = _flood_groups(board.grid)
    width = board.width
    out = []
    for g in range(len(colors)):
        flat = cells[offsets[g] : offsets[g + 1]]
        pts = tuple(sorted((int(f) // width, int(f) % width) for f in flat))
        out.append(Group(cells=pts, color=int(colors[g])))
    return out


def zobrist_code(table: ZobristTable, group: Group) -> int:
    """XOR of the table entries of the group's cells under its color;
    independent of cell ordering."""
    entries = table.table
    width = table.width
    code = 0
    for r, c in group.cells:
        code ^= int(entries[r * width + c, group.color])
    return code


def selective_moves(
    board: Board, *, size_two_after: int = SIZE_TWO_AFTER, inclusive: bool = False
) -> list[Group]:
    """Playout move filter: drop dominant-color groups, but keep dominant
    pairs once enough moves have been played; fall back to the unfiltered
    list when the filter would leave nothing."""
    groups = find_groups(board)
    allow_pairs = (
        board.move_number >= size_two_after if inclusive else board.move_number > size_two_after
    )
    kept = [
        g
        for g in groups
        if g.color != board.dominant or (g.size == 2 and allow_pairs)
    ]
    return kept if kept else groups


def samegame_bias(group: Group, board: Board) -> float:
    """Size-based bias, capped at 8, minus one for dominant-color pairs."""
    tabu = 1 if (group.size == 2 and group.color == board.dominant) else 0
    return float(min(group.size - 2 - tabu, 8))


def apply_move(board: Board, group: Group) -> Board:
    """Remove ``group`` and return the resulting board.

    Raises :class:`IllegalMoveError` unless the group is one of
    ``find_groups(board)``.
    """
    if group not in find_groups(board):
        raise IllegalMoveError(f"group is not currently removable: {group}")
    flat = np.array([r * board.width + c for r, c in group.cells], dtype=np.int32)
    new_grid = _apply_kernel(board.grid, flat)
    gained = (group.size - 2) ** 2
    if new_grid[board.height - 1, 0] == 0:
        gained += CLEAR_BONUS
    return Board(
        new_grid,
        board.dominant,
        board.move_number + 1,
        board.accumulated_score + gained,
    )


def samegame_score(board: Board) -> float:
    """Accumulated score of a finished board (no removable groups left)."""
    if find_groups(board):
        raise ContractError("score queried while removable groups remain")
    return float(board.accumulated_score)


class SameGameProblem(Problem):
    """Search-engine adapter for one starting board.

    Moves are indices into the current ``legal_moves`` list (whose order is
    deterministic), so the engine never constructs group objects on the hot
    path; ``group_for_move`` recovers the full group when needed.  The
    analysis of the most recent board is memoized, so the terminal test,
    move generation, and the transition share one kernel run per state.
    """

    def __init__(
        self,
        board: Board,
        *,
        use_bias: bool = True,
        selective: bool = True,
        zobrist: Optional[ZobristTable] = None,
        zobrist_seed: int = DEFAULT_ZOBRIST_SEED,
        num_colors: int = DEFAULT_COLORS,
        size_two_after: int = SIZE_TWO_AFTER,
        inclusive_threshold: bool = False,
    ) -> None:
        self._root = board
        self.use_bias = use_bias
        self.selective = selective
        self.size_two_after = size_two_after
        self.inclusive_threshold = inclusive_threshold
        if zobrist is None:
            zobrist = make_zobrist_table(
                board.height, board.width, num_colors, zobrist_seed
            )
        self.zobrist = zobrist
        self._memo_board: Optional[Board] = None
        self._memo_data = None

    def _analysis(self, board: Board):
        if board is self._memo_board:
            return self._memo_data
        allow_pairs = (
            board.move_number >= self.size_two_after
            if self.inclusive_threshold
            else board.move_number > self.size_two_after
        )
        data = _moves_kernel(
            board.grid,
            self.zobrist.table,
            board.dominant,
            self.selective,
            allow_pairs,
            self.use_bias,
        )
        self._memo_board = board
        self._memo_data = data
        return data

    def initial_state(self) -> Board:
        return self._root

    def is_terminal(self, board: Board) -> bool:
        return len(self._analysis(board)[0]) == 0

    def legal_moves(self, board: Board) -> list[MoveDescriptor]:
        _, _, codes, biases, _, _ = self._analysis(board)
        return [
            MoveDescriptor(g, code, bias)
            for g, (code, bias) in enumerate(zip(codes.tolist(), biases.tolist()))
        ]

    def play(self, board: Board, move: int) -> Board:
        colors, sizes, _, _, offsets, cells = self._analysis(board)
        if not 0 <= move < len(sizes):
            raise IllegalMoveError(
                f"move {move} out of range: {len(sizes)} groups available"
            )
        removed = cells[offsets[move] : offsets[move + 1]]
        new_grid = _apply_kernel(board.grid, removed)
        gained = (int(sizes[move]) - 2) ** 2
        if new_grid[board.height - 1, 0] == 0:
            gained += CLEAR_BONUS
        return Board(
            new_grid,
            board.dominant,
            board.move_number + 1,
            board.accumulated_score + gained,
        )

    def group_for_move(self, board: Board, move: int) -> Group:
        """The group a move index denotes on ``board`` (for display/replay)."""
        colors, sizes, _, _, offsets, cells = self._analysis(board)
        if not 0 <= move < len(sizes):
            raise IllegalMoveError(
                f"move {move} out of range: {len(sizes)} groups available"
            )
        width = board.width
        flat = cells[offsets[move] : offsets[move + 1]]
        pts = tuple(sorted((int(f) // width, int(f) % width) for f in flat))
        return Group(cells=pts, color=int(colors[move]))

    def score(self, board: Board) -> float:
        if not self.is_terminal(board):
            raise ContractError("score queried on a non-terminal board")
        return float(board.accumulated_score)
