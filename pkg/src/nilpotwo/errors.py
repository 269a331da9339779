"""Exception hierarchy shared by every module."""


class NilpotwoError(Exception):
    """Base class for all errors raised by the package."""


class ParseError(NilpotwoError, ValueError):
    """Malformed textual input.  ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class MalformedCycleError(ParseError):
    pass


class RepeatedPointError(ParseError):
    pass


class PointOutOfRangeError(ParseError):
    pass


class DegreeMismatchError(NilpotwoError, ValueError):
    pass


class CapExceededError(NilpotwoError):
    """A desk-scale cap (order, index, scan size) would be exceeded."""

    def __init__(self, what, value, cap):
        self.what = what
        self.value = value
        self.cap = cap
        super().__init__(f"{what} {value} exceeds cap {cap}")


class NotNormalError(NilpotwoError, ValueError):
    pass


class MembershipError(NilpotwoError, ValueError):
    pass


class SylowSearchError(NilpotwoError):
    """Randomized Sylow search ran out of budget (soft failure, retry with another stream)."""


class TheoremViolation(NilpotwoError):
    """An exhaustive check contradicted a statement that is supposed to be a theorem."""


class OutOfTheoremRange(NilpotwoError, ValueError):
    """Group order below 3: the bound is not defined there."""
