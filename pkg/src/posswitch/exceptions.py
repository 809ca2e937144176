"""Exception hierarchy shared by every module of the package."""


class SwitchingError(ValueError):
    """Base class for all errors raised by posswitch."""


class EmptySet(SwitchingError):
    pass


class EmptyRowSet(SwitchingError):
    pass


class RaggedRows(SwitchingError):
    pass


class DimMismatch(SwitchingError):
    pass


class ModeViolation(SwitchingError):
    """An entry breaks the set's positivity mode.

    ``index`` locates the offending entry as ``(member, row, col)`` for
    matrix lists or ``(row_set, row, col)`` for IRU row-sets.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ChainViolation(SwitchingError):
    def __init__(self, message, pair=None, entry=None):
        super().__init__(message)
        self.pair = pair
        self.entry = entry


class NonFinite(SwitchingError):
    pass


class NotSquare(SwitchingError):
    pass


class NonPositiveScalar(SwitchingError):
    pass


class NonPositiveVector(SwitchingError):
    pass


class NegativeInput(SwitchingError):
    pass


class UnboundRef(SwitchingError):
    pass


class MalformedGraph(SwitchingError):
    pass


class BudgetError(SwitchingError):
    """Common base for enumeration-size guards (CLI exit code 3)."""


class CardinalityOverflow(BudgetError):
    pass


class BudgetExceeded(BudgetError):
    pass


class NoConvergence(SwitchingError):
    pass


class NoDominantMatrix(SwitchingError):
    """No member dominates all images at ``x``.

    ``pair`` holds the indices of the candidate and the member that
    escapes it; ``state`` is filled in by trajectory code with the visited
    state at which selection failed.
    """

    def __init__(self, message, x=None, pair=None, state=None, step=None):
        super().__init__(message)
        self.x = x
        self.pair = pair
        self.state = state
        self.step = step


class ParseError(SwitchingError):
    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ValidationError(SwitchingError):
    def __init__(self, block, reason, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"block {block!r}: {reason}{loc}")
        self.block = block
        self.reason = reason
        self.line = line
        self.column = column
