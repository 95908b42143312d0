"""Stability auditing, lexicographic vector comparison, and inequality metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .core import NEG_INF, Allocation, Instance, UtilityVector, check_feasible, realized_utilities
from .errors import LengthMismatch, UndefinedGini

__all__ = [
    "SPARE_CAPACITY",
    "DISPLACES",
    "FIRST_GREATER",
    "SECOND_GREATER",
    "EQUAL",
    "BlockingPair",
    "MetricsReport",
    "find_blocking_pairs",
    "is_stable",
    "lex_compare_top",
    "lex_compare_bottom",
    "metrics",
]

SPARE_CAPACITY = "spare_capacity"
DISPLACES = "displaces"

# Return values of the lexicographic comparators.
FIRST_GREATER = 1
SECOND_GREATER = -1
EQUAL = 0


@dataclass(frozen=True)
class BlockingPair:
    """A student-school pair that destabilizes an allocation.

    ``reason`` is :data:`SPARE_CAPACITY` (the school has a free seat) or
    :data:`DISPLACES` (the school is full but values the student above
    ``displaced``, its weakest admitted student).  ``student_gain`` is the
    utility the student would gain by moving; ``math.inf`` when the student
    is currently unassigned.
    """

    student: int
    school: int
    reason: str
    displaced: int | None
    student_gain: float

    def to_json(self) -> dict[str, Any]:
        gain = "inf" if math.isinf(self.student_gain) else self.student_gain
        return {
            "student": self.student,
            "school": self.school,
            "reason": self.reason,
            "displaced": self.displaced,
            "student_gain": gain,
        }


def find_blocking_pairs(instance: Instance, allocation: Allocation) -> list[BlockingPair]:
    """Every blocking pair, sorted by (student, school).

    A pair (i, j) blocks when u[i][j] exceeds i's current utility and school
    j either has spare capacity or holds some student it values less than i.
    Exhaustive over all student-school pairs; per-school roster minima are
    cached up front so the scan is O(students x schools).
    """
    check_feasible(instance, allocation)
    u = instance.utilities
    spare: list[int] = []
    weakest: list[int | None] = []  # roster student with the lowest utility at j
    for j, roster in enumerate(allocation.rosters):
        spare.append(instance.capacities[j] - len(roster))
        weakest.append(min(roster, key=lambda i: (u[i][j], i)) if roster else None)

    pairs: list[BlockingPair] = []
    for i in range(instance.n_students):
        current_school = allocation.assignment[i]
        current = u[i][current_school] if current_school is not None else NEG_INF
        for j in range(instance.n_schools):
            if j == current_school or not (u[i][j] > current):
                continue
            gain = u[i][j] - current if current is not NEG_INF else math.inf
            if spare[j] > 0:
                pairs.append(BlockingPair(i, j, SPARE_CAPACITY, None, gain))
            else:
                victim = weakest[j]
                if victim is not None and u[victim][j] < u[i][j]:
                    pairs.append(BlockingPair(i, j, DISPLACES, victim, gain))
    return pairs


def is_stable(instance: Instance, allocation: Allocation) -> bool:
    """True iff the allocation admits no blocking pair."""
    return not find_blocking_pairs(instance, allocation)


def _entries(v: UtilityVector | tuple | list) -> tuple:
    return v.entries if isinstance(v, UtilityVector) else tuple(v)


def lex_compare_top(v1, v2) -> int:
    """Compare two utility vectors sorted descending, elementwise.

    Returns FIRST_GREATER, SECOND_GREATER, or EQUAL.  The larger value at
    the first differing position wins; NEG_INF sits below every float.
    """
    a, b = _entries(v1), _entries(v2)
    if len(a) != len(b):
        raise LengthMismatch(f"cannot compare vectors of length {len(a)} and {len(b)}")
    return _lex(sorted(a, reverse=True), sorted(b, reverse=True))


def lex_compare_bottom(v1, v2) -> int:
    """Compare two utility vectors sorted ascending, elementwise.

    The larger value at the first differing position wins, so a vector whose
    worst entries are better ranks higher.
    """
    a, b = _entries(v1), _entries(v2)
    if len(a) != len(b):
        raise LengthMismatch(f"cannot compare vectors of length {len(a)} and {len(b)}")
    return _lex(sorted(a), sorted(b))


def _lex(a: list, b: list) -> int:
    for x, y in zip(a, b):
        if x == y:
            continue
        return FIRST_GREATER if y < x else SECOND_GREATER
    return EQUAL


@dataclass(frozen=True)
class MetricsReport:
    """Summary statistics of the assigned students' utilities.

    All moments are over assigned students only; unassigned students are
    counted in ``n_unassigned`` rather than poisoning the statistics with
    sentinels.  ``variance`` is the population variance and ``gini`` uses
    the pairwise mean-absolute-difference form
    sum_i sum_k |x_i - x_k| / (2 n^2 mean).
    """

    min_utility: float
    max_utility: float
    range: float
    mean: float
    variance: float
    gini: float
    n_unassigned: int

    def to_json(self) -> dict[str, Any]:
        return {
            "min_utility": self.min_utility,
            "max_utility": self.max_utility,
            "range": self.range,
            "mean": self.mean,
            "variance": self.variance,
            "gini": self.gini,
            "n_unassigned": self.n_unassigned,
            "conventions": {
                "variance": "population",
                "gini": "sum_i sum_k |x_i - x_k| / (2 n^2 mean), assigned students only",
            },
        }


def metrics(instance: Instance, allocation: Allocation) -> MetricsReport:
    """Dispersion metrics of the realized utilities.

    Raises :class:`UndefinedGini` when no student is assigned.
    """
    vector = realized_utilities(instance, allocation)
    values = sorted(vector.finite())
    if not values:
        raise UndefinedGini("no assigned students; inequality metrics are undefined")
    n = len(values)
    total = sum(values)
    mean = total / n
    variance = sum((x - mean) ** 2 for x in values) / n
    # Sorted-vector identity for the pairwise |difference| sum:
    # sum_i sum_k |x_i - x_k| = 2 * sum_k (2k - n - 1) x_(k), 1-based k.
    weighted = sum((2 * k - n - 1) * x for k, x in enumerate(values, start=1))
    gini = weighted / (n * total)
    return MetricsReport(
        min_utility=values[0],
        max_utility=values[-1],
        range=values[-1] - values[0],
        mean=mean,
        variance=variance,
        gini=gini,
        n_unassigned=vector.n_unassigned,
    )
