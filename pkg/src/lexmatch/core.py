"""Domain types for many-to-one matching economies.

An economy consists of students (rows) and schools (columns) with a dense
matrix of strictly positive utilities, per-school capacities, and at most as
many schools as students.  Preferences are aligned: a school's utility for a
set of students is the sum of those students' utilities for it, so a single
matrix describes both sides of the market.  Everything here is immutable
after construction and safe to share between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    DimensionMismatch,
    IndifferenceViolation,
    InfeasibleAllocation,
    InstanceFormatError,
    NonPositiveCapacity,
    NonPositiveUtility,
    TooManySchools,
)

__all__ = [
    "NEG_INF",
    "Instance",
    "Allocation",
    "UtilityVector",
    "build_instance",
    "realized_utilities",
    "parse_instance",
    "serialize_instance",
    "check_feasible",
]


class _NegInf:
    """Sentinel for the utility of an unassigned student.

    A tagged value rather than a float, so it can never collide with a matrix
    entry.  It compares below every real number and equals only itself.
    """

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        if isinstance(other, _NegInf):
            return False
        if isinstance(other, (int, float)):
            return True
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, (_NegInf, int, float)):
            return True
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, (_NegInf, int, float)):
            return False
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, _NegInf):
            return True
        if isinstance(other, (int, float)):
            return False
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, _NegInf)

    def __hash__(self):
        return hash("lexmatch.NEG_INF")

    def __repr__(self):
        return "NEG_INF"

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()


@dataclass(frozen=True)
class Instance:
    """A validated matching economy.

    ``utilities[i][j]`` is student ``i``'s utility at school ``j``.  The
    school side needs no separate matrix: alignment makes a school rank
    students by the same numbers.  Construct through :func:`build_instance`,
    which enforces the standing assumptions.
    """

    n_students: int
    n_schools: int
    capacities: tuple[int, ...]
    utilities: tuple[tuple[float, ...], ...]

    def utility(self, student: int, school: int) -> float:
        return self.utilities[student][school]

    @property
    def total_capacity(self) -> int:
        return sum(self.capacities)

    @property
    def max_cardinality(self) -> int:
        """Number of students any capacity-saturating allocation assigns."""
        return min(self.n_students, self.total_capacity)

    def all_values(self) -> list[float]:
        """Every matrix entry, row-major."""
        return [u for row in self.utilities for u in row]


@dataclass(frozen=True)
class Allocation:
    """A student-to-school assignment together with per-school rosters.

    ``assignment[i]`` is the school of student ``i`` or None when unassigned.
    ``rosters[j]`` lists the students at school ``j`` in increasing index
    order.  Both views are kept and must agree; prefer
    :meth:`from_assignment`, which derives the rosters.
    """

    assignment: tuple[int | None, ...]
    rosters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        derived = _rosters_from_assignment(self.assignment, len(self.rosters))
        if derived != self.rosters:
            raise InfeasibleAllocation("rosters do not match the assignment")

    @classmethod
    def from_assignment(cls, assignment: Sequence[int | None], n_schools: int) -> "Allocation":
        assignment = tuple(assignment)
        for i, j in enumerate(assignment):
            if j is not None and not (0 <= j < n_schools):
                raise InfeasibleAllocation(
                    f"student {i} assigned to unknown school {j}"
                )
        return cls(assignment, _rosters_from_assignment(assignment, n_schools))

    @property
    def n_assigned(self) -> int:
        return sum(1 for j in self.assignment if j is not None)

    def school_of(self, student: int) -> int | None:
        return self.assignment[student]


def _rosters_from_assignment(
    assignment: Sequence[int | None], n_schools: int
) -> tuple[tuple[int, ...], ...]:
    rosters: list[list[int]] = [[] for _ in range(n_schools)]
    for i, j in enumerate(assignment):
        if j is not None:
            if not (0 <= j < n_schools):
                raise InfeasibleAllocation(f"student {i} assigned to unknown school {j}")
            rosters[j].append(i)
    return tuple(tuple(r) for r in rosters)


@dataclass(frozen=True)
class UtilityVector:
    """Per-student realized utilities; unassigned students hold NEG_INF."""

    entries: tuple = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.entries)

    def sorted_ascending(self) -> tuple:
        return tuple(sorted(self.entries))

    def sorted_descending(self) -> tuple:
        return tuple(sorted(self.entries, reverse=True))

    def finite(self) -> tuple[float, ...]:
        return tuple(u for u in self.entries if u is not NEG_INF)

    @property
    def n_unassigned(self) -> int:
        return sum(1 for u in self.entries if u is NEG_INF)


def build_instance(
    n_students: int,
    n_schools: int,
    capacities: Sequence[int],
    utilities: Sequence[Sequence[float]],
    strict: bool = True,
) -> Instance:
    """Validate and freeze an economy.

    Checks, in order: positive counts, matrix and capacity dimensions,
    capacity positivity, school count at most student count, and utilities
    finite and strictly positive.  With ``strict`` (the default), any
    duplicated value anywhere in the matrix raises
    :class:`IndifferenceViolation` listing the colliding pairs; solvers
    compare utilities across rows and columns, so cross-pair ties are
    rejected too.  Non-strict instances are accepted and solvers fall back
    to a deterministic (student, school) index tie-break.
    """
    if n_students < 1 or n_schools < 1:
        raise DimensionMismatch(
            f"economy needs at least one student and one school, "
            f"got {n_students} students, {n_schools} schools"
        )
    if len(capacities) != n_schools:
        raise DimensionMismatch(
            f"expected {n_schools} capacities, got {len(capacities)}"
        )
    if len(utilities) != n_students:
        raise DimensionMismatch(
            f"expected {n_students} utility rows, got {len(utilities)}"
        )
    for i, row in enumerate(utilities):
        if len(row) != n_schools:
            raise DimensionMismatch(
                f"utility row {i} has {len(row)} entries, expected {n_schools}"
            )
    caps: list[int] = []
    for j, q in enumerate(capacities):
        q_int = int(q)
        if q_int != q or q_int < 1:
            raise NonPositiveCapacity(f"school {j} has capacity {q!r}; must be a positive integer")
        caps.append(q_int)
    if n_schools > n_students:
        raise TooManySchools(
            f"{n_schools} schools for {n_students} students; school count must be weakly smaller"
        )
    matrix: list[tuple[float, ...]] = []
    for i, row in enumerate(utilities):
        frozen_row = []
        for j, u in enumerate(row):
            value = float(u)
            if not math.isfinite(value) or value <= 0.0:
                raise NonPositiveUtility(
                    f"u[{i}][{j}] = {u!r}; utilities must be finite and strictly positive"
                )
            frozen_row.append(value)
        matrix.append(tuple(frozen_row))
    if strict:
        _reject_duplicates(matrix)
    return Instance(n_students, n_schools, tuple(caps), tuple(matrix))


def _reject_duplicates(matrix: list[tuple[float, ...]]) -> None:
    seen: dict[float, list[tuple[int, int]]] = {}
    for i, row in enumerate(matrix):
        for j, u in enumerate(row):
            seen.setdefault(u, []).append((i, j))
    collisions = [pairs for pairs in seen.values() if len(pairs) > 1]
    if collisions:
        collisions.sort(key=lambda pairs: pairs[0])
        shown = ", ".join(
            f"{value_pairs}" for value_pairs in (collisions[:3])
        )
        raise IndifferenceViolation(
            f"{len(collisions)} duplicated utility value(s) in strict mode; "
            f"colliding pairs: {shown}",
            collisions,
        )


def check_feasible(instance: Instance, allocation: Allocation) -> None:
    """Raise :class:`InfeasibleAllocation` unless the allocation fits the instance."""
    if len(allocation.assignment) != instance.n_students:
        raise InfeasibleAllocation(
            f"allocation covers {len(allocation.assignment)} students, "
            f"instance has {instance.n_students}"
        )
    if len(allocation.rosters) != instance.n_schools:
        raise InfeasibleAllocation(
            f"allocation has {len(allocation.rosters)} rosters, "
            f"instance has {instance.n_schools} schools"
        )
    for j, roster in enumerate(allocation.rosters):
        if len(roster) > instance.capacities[j]:
            raise InfeasibleAllocation(
                f"school {j} holds {len(roster)} students, capacity {instance.capacities[j]}"
            )


def realized_utilities(instance: Instance, allocation: Allocation) -> UtilityVector:
    """Utility each student realizes under the allocation; NEG_INF when unassigned."""
    check_feasible(instance, allocation)
    entries = tuple(
        instance.utilities[i][j] if j is not None else NEG_INF
        for i, j in enumerate(allocation.assignment)
    )
    return UtilityVector(entries)


# ---------------------------------------------------------------------------
# Instance file format: a UTF-8 JSON object with the keys n_students,
# n_schools, capacities, utilities, in that order, two-space indentation,
# floats in shortest round-trip decimal form.
# ---------------------------------------------------------------------------


def serialize_instance(instance: Instance) -> str:
    doc = {
        "n_students": instance.n_students,
        "n_schools": instance.n_schools,
        "capacities": list(instance.capacities),
        "utilities": [list(row) for row in instance.utilities],
    }
    return json.dumps(doc, indent=2)


def parse_instance(text: str, strict: bool = True) -> Instance:
    """Parse the instance file format; inverse of :func:`serialize_instance`.

    Raises :class:`InstanceFormatError` with the line/column of the first
    syntax problem, or the relevant validation error from
    :func:`build_instance`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc
    return instance_from_json(doc, strict=strict)


def instance_from_json(doc, strict: bool = True) -> Instance:
    """Validate an already-decoded instance document."""
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    missing = [k for k in ("n_students", "n_schools", "capacities", "utilities") if k not in doc]
    if missing:
        raise InstanceFormatError(f"missing field(s): {', '.join(missing)}")
    n_students, n_schools = doc["n_students"], doc["n_schools"]
    if not all(
        isinstance(v, int) and not isinstance(v, bool) for v in (n_students, n_schools)
    ):
        raise InstanceFormatError("n_students and n_schools must be integers")
    capacities = doc["capacities"]
    utilities = doc["utilities"]
    if not isinstance(capacities, list) or not all(
        isinstance(q, int) and not isinstance(q, bool) for q in capacities
    ):
        raise InstanceFormatError("capacities must be an array of integers")
    if not isinstance(utilities, list) or not all(isinstance(row, list) for row in utilities):
        raise InstanceFormatError("utilities must be an array of arrays of numbers")
    for row in utilities:
        for u in row:
            if not isinstance(u, (int, float)) or isinstance(u, bool):
                raise InstanceFormatError("utilities must be an array of arrays of numbers")
    return build_instance(n_students, n_schools, capacities, utilities, strict=strict)
