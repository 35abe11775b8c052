"""Nested rollout policy adaptation with temperature and bias.

A softmax playout policy over 64-bit move codes, adapted toward the best
sequence found at each nesting level, with SameGame and TSPTW domains and a
statistics-emitting benchmark harness.
"""

from .engine import (
    Policy,
    PlayoutRecord,
    PlayoutStep,
    ScoredSequence,
    SearchParams,
    adapt,
    adapt_optimized,
    gnrpa,
    gradient_oracle,
    move_probabilities,
    playout,
    run_search,
)
from .errors import (
    ContractError,
    DeadEndError,
    GnrpaError,
    IllegalMoveError,
    MalformedRecordError,
    ParseError,
)
from .problem import MoveDescriptor, Problem, replay

__all__ = [
    "ContractError",
    "DeadEndError",
    "GnrpaError",
    "IllegalMoveError",
    "MalformedRecordError",
    "MoveDescriptor",
    "ParseError",
    "PlayoutRecord",
    "PlayoutStep",
    "Policy",
    "Problem",
    "ScoredSequence",
    "SearchParams",
    "adapt",
    "adapt_optimized",
    "gnrpa",
    "gradient_oracle",
    "move_probabilities",
    "playout",
    "replay",
    "run_search",
]

__version__ = "0.1.0"
