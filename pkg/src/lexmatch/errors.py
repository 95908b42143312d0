"""Exception hierarchy shared by all lexmatch modules."""

from __future__ import annotations


class MatchingError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(MatchingError):
    """Matrix or vector shapes disagree with the declared counts."""


class NonPositiveUtility(MatchingError):
    """A utility entry is not a strictly positive finite number."""


class NonPositiveCapacity(MatchingError):
    """A school capacity is smaller than one."""


class TooManySchools(MatchingError):
    """More schools than students."""


class IndifferenceViolation(MatchingError):
    """Duplicate utility values found while strict mode is on.

    Carries ``collisions``: a list of groups, each group being the list of
    (student, school) pairs sharing one value.
    """

    def __init__(self, message: str, collisions: list[list[tuple[int, int]]]):
        super().__init__(message)
        self.collisions = collisions


class InstanceFormatError(MatchingError):
    """Instance or allocation text could not be parsed.

    ``line`` and ``column`` are 1-based when the underlying JSON parser
    provides a position, otherwise None.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class InfeasibleAllocation(MatchingError):
    """An allocation violates consistency or capacity constraints."""


class LengthMismatch(MatchingError):
    """Two utility vectors of different length were compared."""


class UndefinedGini(MatchingError):
    """Inequality metrics requested for an allocation with no assigned students."""


class BudgetExceeded(MatchingError):
    """Brute-force enumeration would exceed the configured budget."""


class CapacityMismatch(MatchingError):
    """Generated capacities cannot cover the requested student count."""


class NotAGrid(MatchingError):
    """Tile rendering requested for an instance whose students are not on a grid."""
