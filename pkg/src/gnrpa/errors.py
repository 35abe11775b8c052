"""Exception types shared across the package."""


class GnrpaError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(GnrpaError, ValueError):
    """An operation was called with arguments violating its preconditions."""


class DeadEndError(GnrpaError):
    """A non-terminal state offered no legal moves."""


class MalformedRecordError(GnrpaError, ValueError):
    """A playout record is internally inconsistent (bad index or lengths)."""


class IllegalMoveError(GnrpaError, ValueError):
    """A move was not legal in the state it was applied to."""


class ParseError(GnrpaError, ValueError):
    """An instance or board file could not be parsed."""
