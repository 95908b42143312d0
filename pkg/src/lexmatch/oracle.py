"""Brute-force ground truth for tiny economies.

Enumerates every feasible allocation of a small instance and derives, by
exhaustion, the quantities the fast solvers are supposed to produce: the set
of stable allocations, the allocation whose sorted utility vector is
lexicographically maximal from the top, and the max-cardinality allocation
maximal from the bottom.  Nothing here shares code with the solver or audit
paths; agreement between the two routes is what the test suite checks.

Deliberately simple and unscalable: enumeration is capped by an explicit
budget and aborts with :class:`BudgetExceeded` beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .core import NEG_INF, Allocation, Instance
from .errors import BudgetExceeded

__all__ = [
    "EnumerationBudget",
    "enumerate_feasible",
    "brute_force_stable",
    "brute_force_lex_top",
    "brute_force_lex_bottom",
    "definition_blocking_exists",
]

DEFAULT_MAX_STUDENTS = 7
DEFAULT_MAX_ALLOCATIONS = 10**7


@dataclass(frozen=True)
class EnumerationBudget:
    """Hard limits on what the oracle will attempt to enumerate."""

    max_students: int = DEFAULT_MAX_STUDENTS
    max_allocations: int = DEFAULT_MAX_ALLOCATIONS


def _check_budget(instance: Instance, budget: EnumerationBudget) -> None:
    if instance.n_students > budget.max_students:
        raise BudgetExceeded(
            f"{instance.n_students} students exceeds the enumeration budget "
            f"of {budget.max_students}"
        )


def _assignments(instance: Instance, budget: EnumerationBudget) -> Iterator[list[int | None]]:
    """Yield every feasible assignment as a reused mutable buffer.

    Students are decided in index order; each may stay unassigned or take any
    school with remaining capacity, so partial allocations are included.
    Callers must copy the buffer if they keep it.
    """
    n, m = instance.n_students, instance.n_schools
    remaining = list(instance.capacities)
    buffer: list[int | None] = [None] * n
    count = 0

    def rec(i: int) -> Iterator[list[int | None]]:
        nonlocal count
        if i == n:
            count += 1
            if count > budget.max_allocations:
                raise BudgetExceeded(
                    f"more than {budget.max_allocations} feasible allocations"
                )
            yield buffer
            return
        buffer[i] = None
        yield from rec(i + 1)
        for j in range(m):
            if remaining[j] > 0:
                remaining[j] -= 1
                buffer[i] = j
                yield from rec(i + 1)
                remaining[j] += 1
        buffer[i] = None

    return rec(0)


def enumerate_feasible(
    instance: Instance, budget: EnumerationBudget = EnumerationBudget()
) -> Iterator[Allocation]:
    """Yield every feasible allocation exactly once, in a fixed order."""
    _check_budget(instance, budget)
    for assignment in _assignments(instance, budget):
        yield Allocation.from_assignment(assignment, instance.n_schools)


def definition_blocking_exists(instance: Instance, assignment: list[int | None]) -> bool:
    """Direct double-loop transcription of the blocking-pair condition.

    A pair (i, j) blocks when i strictly prefers j to its current school and
    j either has a free seat or holds a student it values less than i.
    Written independently of the audit module on purpose.
    """
    u = instance.utilities
    load = [0] * instance.n_schools
    for j in assignment:
        if j is not None:
            load[j] += 1
    for i in range(instance.n_students):
        current = u[i][assignment[i]] if assignment[i] is not None else NEG_INF
        for j in range(instance.n_schools):
            if not (u[i][j] > current):
                continue
            if load[j] < instance.capacities[j]:
                return True
            for i2 in range(instance.n_students):
                if assignment[i2] == j and u[i2][j] < u[i][j]:
                    return True
    return False


def brute_force_stable(
    instance: Instance, budget: EnumerationBudget = EnumerationBudget()
) -> list[Allocation]:
    """All stable allocations, by filtering the full enumeration."""
    _check_budget(instance, budget)
    stable = []
    for assignment in _assignments(instance, budget):
        if not definition_blocking_exists(instance, assignment):
            stable.append(Allocation.from_assignment(list(assignment), instance.n_schools))
    return stable


def _utility_key(instance: Instance, assignment: list[int | None]) -> list[float]:
    # NEG_INF sorts below every float via its comparison methods.
    return sorted(
        instance.utilities[i][j] if j is not None else NEG_INF
        for i, j in enumerate(assignment)
    )


def brute_force_lex_top(
    instance: Instance, budget: EnumerationBudget = EnumerationBudget()
) -> Allocation:
    """The feasible allocation maximizing descending-sorted utilities lexicographically."""
    _check_budget(instance, budget)
    best_key: list | None = None
    best: list[int | None] | None = None
    for assignment in _assignments(instance, budget):
        key = _utility_key(instance, assignment)
        key.reverse()
        if best_key is None or _lex_greater(key, best_key):
            best_key = key
            best = list(assignment)
    assert best is not None
    return Allocation.from_assignment(best, instance.n_schools)


def brute_force_lex_bottom(
    instance: Instance, budget: EnumerationBudget = EnumerationBudget()
) -> Allocation:
    """Among max-cardinality allocations, the one maximizing ascending-sorted
    utilities lexicographically (the first entry ties break to the second,
    and so on)."""
    _check_budget(instance, budget)
    target = instance.max_cardinality
    best_key: list | None = None
    best: list[int | None] | None = None
    for assignment in _assignments(instance, budget):
        if sum(1 for j in assignment if j is not None) != target:
            continue
        key = _utility_key(instance, assignment)
        if best_key is None or _lex_greater(key, best_key):
            best_key = key
            best = list(assignment)
    assert best is not None
    return Allocation.from_assignment(best, instance.n_schools)


def _lex_greater(a: list, b: list) -> bool:
    for x, y in zip(a, b):
        if x == y:
            continue
        return y < x
    return False
