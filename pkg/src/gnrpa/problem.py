"""The contract an optimization domain implements so the search engine can run it.

A domain exposes a deterministic single-agent decision process: an initial
state, a terminal test, legal moves (each carrying a 64-bit weight-table code
and an additive softmax bias), a transition function, and a score on terminal
states.  The engine maximizes the score, so minimization domains return a
negated objective.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, NamedTuple

from .errors import IllegalMoveError


class MoveDescriptor(NamedTuple):
    """A legal move, its weight-table code, and its softmax bias.

    ``code`` must be a pure function of the domain's declared code scheme:
    replaying the same moves from the initial state reproduces the same
    codes.  ``bias`` is the additive term this move contributes inside the
    softmax exponent; domains without prior knowledge use 0.
    """

    move: Any
    code: int
    bias: float


class Problem(ABC):
    """Deterministic single-agent domain driven by the search engine.

    Implementations must be deterministic: replaying a recorded move
    sequence from the initial state reproduces the same states, legal-move
    lists, codes, and biases.  ``score`` is only queried on terminal states.
    Instances are used from one thread at a time; distinct instances are
    independent.
    """

    @abstractmethod
    def initial_state(self) -> Any:
        """Return the root state."""

    @abstractmethod
    def is_terminal(self, state: Any) -> bool:
        """True when no further moves are to be played from ``state``."""

    @abstractmethod
    def legal_moves(self, state: Any) -> list[MoveDescriptor]:
        """Legal moves of a non-terminal ``state``, in a deterministic order."""

    @abstractmethod
    def play(self, state: Any, move: Any) -> Any:
        """Apply ``move`` and return the successor state."""

    @abstractmethod
    def score(self, state: Any) -> float:
        """Score of a terminal ``state``; higher is better."""


def replay(problem: Problem, moves: list) -> Any:
    """Re-apply a recorded move sequence from the initial state.

    Validates every move against the legal-move list of the state it is
    played in, so a corrupted or out-of-order sequence fails loudly instead
    of silently producing a wrong terminal state.

    Returns the state reached after the last move (the terminal state when
    ``moves`` is a complete playout).  Raises :class:`IllegalMoveError`
    naming the step index of the first illegal move.
    """
    state = problem.initial_state()
    for i, move in enumerate(moves):
        if problem.is_terminal(state):
            raise IllegalMoveError(f"move at step {i} played in a terminal state")
        descriptors = problem.legal_moves(state)
        if not any(d.move == move for d in descriptors):
            raise IllegalMoveError(f"move at step {i} is not legal: {move!r}")
        state = problem.play(state, move)
    return state
