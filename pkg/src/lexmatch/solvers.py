"""The three matching mechanisms.

* :func:`max_max_lex` -- greedy best-pair-first.  Repeatedly matches the
  unassigned student and non-full school whose pairing has the highest
  utility.  Under aligned preferences this is the unique stable allocation
  and lexicographically maximizes the sorted utility vector from the top.
* :func:`deferred_acceptance` -- student-proposing deferred acceptance with
  schools ranking students by the shared utility matrix.  Kept as a fully
  independent implementation; on tie-free instances it must coincide with
  max_max_lex, and the test suite leans on that cross-check.
* :func:`max_min_lex` -- egalitarian counterpart.  Maximizes the worst
  assigned utility, fixes the pair attaining it, and re-solves the residual
  problem; on tie-free instances this yields the max-cardinality allocation
  whose ascending-sorted utility vector is lexicographically maximal from
  the bottom.

Supporting pieces: :func:`feasible_above` (can a capacity-saturating
allocation avoid any assigned utility below a threshold?) and
:func:`bottleneck_value` (the largest such threshold).

Everything is a pure function of the instance and deterministic: same input,
bit-identical allocation and trace.  Ties, only possible on non-strict
instances, break toward the lowest student index then lowest school index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .core import NEG_INF, Allocation, Instance, realized_utilities

__all__ = [
    "MatchEvent",
    "DARound",
    "ProbeEvent",
    "FixEvent",
    "SolverTrace",
    "Threshold",
    "max_max_lex",
    "deferred_acceptance",
    "feasible_above",
    "bottleneck_value",
    "max_min_lex",
    "replay_match_events",
    "allocation_to_json",
    "allocation_from_json",
]


@dataclass(frozen=True)
class MatchEvent:
    """One greedy step: at ``step``, ``student`` was matched to ``school``."""

    step: int
    student: int
    school: int
    utility: float

    def to_json(self) -> dict[str, Any]:
        return {
            "type": "match",
            "step": self.step,
            "student": self.student,
            "school": self.school,
            "utility": self.utility,
        }


@dataclass(frozen=True)
class DARound:
    """One proposal round: who proposed where, and which offers died."""

    round: int
    proposals: tuple[tuple[int, int], ...]
    rejections: tuple[tuple[int, int], ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "type": "round",
            "round": self.round,
            "proposals": [list(p) for p in self.proposals],
            "rejections": [list(r) for r in self.rejections],
        }


@dataclass(frozen=True)
class ProbeEvent:
    """A feasibility question actually asked during the bottleneck sweep:
    can every remaining assignment stay strictly above ``threshold``?"""

    threshold: float
    feasible: bool

    def to_json(self) -> dict[str, Any]:
        return {"type": "probe", "threshold": self.threshold, "feasible": self.feasible}


@dataclass(frozen=True)
class FixEvent:
    """Level ``level`` of the egalitarian solver pinned ``student`` to
    ``school`` at utility ``threshold``."""

    level: int
    threshold: float
    student: int
    school: int

    def to_json(self) -> dict[str, Any]:
        return {
            "type": "fix",
            "level": self.level,
            "threshold": self.threshold,
            "student": self.student,
            "school": self.school,
        }


@dataclass(frozen=True)
class SolverTrace:
    """Execution log of a solver run, in event order."""

    algorithm: str
    events: tuple

    def to_json(self) -> list[dict[str, Any]]:
        return [e.to_json() for e in self.events]


@dataclass(frozen=True)
class Threshold:
    """A utility level; NEG_INF when no finite level applies."""

    value: Any  # float or NEG_INF


# ---------------------------------------------------------------------------
# Greedy best-pair-first
# ---------------------------------------------------------------------------


def max_max_lex(instance: Instance) -> tuple[Allocation, SolverTrace]:
    """Match the globally best remaining student-school pair until students
    or capacity run out.

    Implemented as one sweep over all pairs sorted by decreasing utility
    (ties: lowest student, then lowest school), skipping already-assigned
    students and full schools -- the same result as recomputing the argmax
    each round, in O(nm log nm).
    """
    u = instance.utilities
    pairs = sorted(
        ((u[i][j], i, j) for i in range(instance.n_students) for j in range(instance.n_schools)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    remaining = list(instance.capacities)
    assignment: list[int | None] = [None] * instance.n_students
    target = instance.max_cardinality
    events: list[MatchEvent] = []
    for value, i, j in pairs:
        if len(events) == target:
            break
        if assignment[i] is None and remaining[j] > 0:
            assignment[i] = j
            remaining[j] -= 1
            events.append(MatchEvent(len(events), i, j, value))
    allocation = Allocation.from_assignment(assignment, instance.n_schools)
    return allocation, SolverTrace("max-max-lex", tuple(events))


def replay_match_events(
    events: Sequence[MatchEvent], n_students: int, n_schools: int
) -> Allocation:
    """Rebuild the allocation a greedy trace describes."""
    assignment: list[int | None] = [None] * n_students
    for e in events:
        assignment[e.student] = e.school
    return Allocation.from_assignment(assignment, n_schools)


# ---------------------------------------------------------------------------
# Student-proposing deferred acceptance
# ---------------------------------------------------------------------------


def deferred_acceptance(instance: Instance) -> tuple[Allocation, SolverTrace]:
    """Round-based deferred acceptance.

    Each round every unassigned student proposes to the best school not yet
    tried; each school keeps the top proposals-plus-holds by its own utility
    for the students (which alignment makes the same matrix) up to capacity
    and rejects the rest.  Stops when no proposals are left to make.
    """
    n, m = instance.n_students, instance.n_schools
    u = instance.utilities
    prefs = [
        sorted(range(m), key=lambda j, i=i: (-u[i][j], j)) for i in range(n)
    ]
    next_choice = [0] * n
    held: list[list[int]] = [[] for _ in range(m)]
    assigned = [False] * n
    events: list[DARound] = []
    round_no = 0
    while True:
        proposals = []
        for i in range(n):
            if not assigned[i] and next_choice[i] < m:
                proposals.append((i, prefs[i][next_choice[i]]))
                next_choice[i] += 1
        if not proposals:
            break
        by_school: dict[int, list[int]] = {}
        for i, j in proposals:
            by_school.setdefault(j, []).append(i)
        rejections = []
        for j, proposers in by_school.items():
            pool = held[j] + proposers
            pool.sort(key=lambda i: (-u[i][j], i))
            kept = pool[: instance.capacities[j]]
            for i in pool[instance.capacities[j] :]:
                rejections.append((i, j))
                assigned[i] = False
            for i in kept:
                assigned[i] = True
            held[j] = kept
        rejections.sort()
        events.append(DARound(round_no, tuple(proposals), tuple(rejections)))
        round_no += 1
    assignment: list[int | None] = [None] * n
    for j, students in enumerate(held):
        for i in students:
            assignment[i] = j
    allocation = Allocation.from_assignment(assignment, m)
    return allocation, SolverTrace("da", tuple(events))


# ---------------------------------------------------------------------------
# Threshold feasibility and the bottleneck value
# ---------------------------------------------------------------------------


def _kuhn_size(
    n: int, caps: Sequence[int], adjacency: Sequence[Sequence[int]]
) -> int:
    """Maximum-cardinality matching size, students unit, schools capacitated.

    Augmenting-path search (depth-first, schools visited at most once per
    search); deterministic and simple, which is all the intended instance
    sizes need.
    """
    m = len(caps)
    matched = [-1] * n
    roster: list[list[int]] = [[] for _ in range(m)]
    visited = [0] * m
    epoch = 0

    def dfs(x: int) -> bool:
        for j in adjacency[x]:
            if visited[j] == epoch:
                continue
            visited[j] = epoch
            if len(roster[j]) < caps[j]:
                roster[j].append(x)
                matched[x] = j
                return True
            for y in roster[j]:
                if dfs(y):
                    roster[j].remove(y)
                    roster[j].append(x)
                    matched[x] = j
                    return True
        return False

    size = 0
    for x in range(n):
        if adjacency[x]:
            epoch += 1
            if dfs(x):
                size += 1
    return size


def feasible_above(instance: Instance, threshold) -> bool:
    """Can min(students, total capacity) students be assigned using only
    pairs at or above ``threshold``?

    ``threshold`` may be a float or NEG_INF (every pair admissible).
    Decided by maximum-cardinality matching on the admissible edges.
    """
    u = instance.utilities
    adjacency = [
        [j for j in range(instance.n_schools) if u[i][j] >= threshold]
        for i in range(instance.n_students)
    ]
    size = _kuhn_size(instance.n_students, instance.capacities, adjacency)
    return size == instance.max_cardinality


def bottleneck_value(instance: Instance) -> Threshold:
    """The best worst-off level: the largest matrix value v such that a
    capacity-saturating allocation can keep every assigned student at or
    above v.  Binary search over the sorted distinct values, since
    :func:`feasible_above` is monotone.
    """
    values = sorted(set(instance.all_values()))
    best = None
    lo, hi = 0, len(values) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        if feasible_above(instance, values[mid]):
            best = values[mid]
            lo = mid + 1
        else:
            hi = mid - 1
    return Threshold(best if best is not None else NEG_INF)


# ---------------------------------------------------------------------------
# Egalitarian solver: iterated bottleneck via one ascending deletion sweep
# ---------------------------------------------------------------------------


class _BottleneckSweep:
    """Shared state of the max-min-lex computation.

    The iterated-bottleneck recursion (find the bottleneck level, pin its
    pair, recurse on the residual) is folded into a single pass over all
    pairs in ascending utility order.  A maximum-cardinality matching is
    maintained throughout; deleting a pair the matching does not use is
    free, deleting a matching edge triggers an augmenting-path repair, and
    a failed repair certifies that the deleted pair is exactly the current
    bottleneck pair, which is then pinned for good.  Levels are strictly
    increasing on tie-free instances, so the pointer never needs to move
    backwards outside the tie fallback.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        n, m, u = instance.n_students, instance.n_schools, instance.utilities
        self.n, self.m = n, m
        self.caps = instance.capacities
        # All pairs, ascending; ties by (student, school).
        self.pairs = sorted(
            ((u[i][j], i, j) for i in range(n) for j in range(m)),
            key=lambda t: (t[0], t[1], t[2]),
        )
        # Per-student schools in descending utility: the admissible pairs at
        # any moment of the sweep are exactly a prefix of each list.
        self.adj = [
            sorted(range(m), key=lambda j, i=i: (-u[i][j], -j)) for i in range(n)
        ]
        self.adm_len = [m] * n
        # Mirror image per school.
        self.radj = [
            sorted(range(n), key=lambda i, j=j: (-u[i][j], -i)) for j in range(m)
        ]
        self.radm_len = [n] * m
        self.matched = [-1] * n
        self.fixed = [False] * n
        self.roster: list[list[int]] = [[] for _ in range(m)]
        self.visited = [0] * m
        self.epoch = 0
        self.events: list = []
        self.fixes = 0

        # Seed the matching with the greedy allocation: maximum cardinality
        # by construction, and it tends to sit on high-utility pairs, which
        # keeps early deletions cheap.
        seed_allocation, _ = max_max_lex(instance)
        for i, j in enumerate(seed_allocation.assignment):
            if j is not None:
                self.matched[i] = j
                self.roster[j].append(i)

    # -- augmenting-path repairs ------------------------------------------

    def _seats_free(self, j: int) -> int:
        return self.caps[j] - len(self.roster[j])

    def _forward(self, x: int) -> bool:
        """Find x a seat, rerouting others if needed.  Used when students,
        not seats, are the scarce side: x is then the only free student."""
        for idx in range(self.adm_len[x]):
            j = self.adj[x][idx]
            if self.visited[j] == self.epoch:
                continue
            self.visited[j] = self.epoch
            if self._seats_free(j) > 0:
                self.roster[j].append(x)
                self.matched[x] = j
                return True
            for y in self.roster[j]:
                if not self.fixed[y] and self._forward(y):
                    self.roster[j].remove(y)
                    self.roster[j].append(x)
                    self.matched[x] = j
                    return True
        return False

    def _fill_seat(self, j: int) -> bool:
        """Fill one free seat at j, pulling students along alternating paths
        until an unmatched student is absorbed.  Used when seats are the
        scarce side: the freed seat is then the only one, but several
        students may be free."""
        self.visited[j] = self.epoch
        for idx in range(self.radm_len[j]):
            x = self.radj[j][idx]
            if not self.fixed[x] and self.matched[x] == -1:
                self.roster[j].append(x)
                self.matched[x] = j
                return True
        for idx in range(self.radm_len[j]):
            x = self.radj[j][idx]
            if self.fixed[x]:
                continue
            j2 = self.matched[x]
            if j2 == j or self.visited[j2] == self.epoch:
                continue
            if self._fill_seat(j2):
                self.roster[j2].remove(x)
                self.roster[j].append(x)
                self.matched[x] = j
                return True
        return False

    def _repair(self, student: int, school: int) -> bool:
        self.epoch += 1
        if self.instance.total_capacity < self.n:
            return self._fill_seat(school)
        return self._forward(student)

    # -- main sweep --------------------------------------------------------

    def run(self) -> tuple[Allocation, SolverTrace]:
        target = self.instance.max_cardinality
        pairs = self.pairs
        p = 0
        while self.fixes < target:
            assert p < len(pairs), "sweep exhausted pairs before pinning all levels"
            value, i, j = pairs[p]
            # Deletion bookkeeping is positional: this is always the last
            # admissible entry of both prefixes.
            self.adm_len[i] -= 1
            self.radm_len[j] -= 1
            if self.fixed[i] or self.matched[i] != j:
                p += 1
                continue
            # The matching needs this edge; ask whether it can do without it.
            self.roster[j].remove(i)
            self.matched[i] = -1
            repaired = self._repair(i, j)
            self.events.append(ProbeEvent(value, repaired))
            if repaired:
                p += 1
                continue
            # No repair: `value` is the bottleneck of the residual problem.
            group_start = self._group_start(p, value)
            group_end = self._group_end(p, value)
            if group_end - group_start == 1:
                self._pin(i, j, value)
                p += 1
            else:
                # Tied values: pick the pin deterministically and rewind.
                p = self._pin_from_tie_group(group_start, group_end, value)
        assignment: list[int | None] = [None] * self.n
        for i in range(self.n):
            if self.fixed[i]:
                assignment[i] = self.matched[i]
        allocation = Allocation.from_assignment(assignment, self.m)
        return allocation, SolverTrace("max-min-lex", tuple(self.events))

    def _pin(self, i: int, j: int, value: float) -> None:
        self.roster[j].append(i)
        self.matched[i] = j
        self.fixed[i] = True
        self.events.append(FixEvent(self.fixes, value, i, j))
        self.fixes += 1

    def _group_start(self, p: int, value: float) -> int:
        while p > 0 and self.pairs[p - 1][0] == value:
            p -= 1
        return p

    def _group_end(self, p: int, value: float) -> int:
        p += 1
        while p < len(self.pairs) and self.pairs[p][0] == value:
            p += 1
        return p

    # -- tie fallback (non-strict instances only) ---------------------------

    def _pin_from_tie_group(self, group_start: int, group_end: int, value: float) -> int:
        """Pin the lowest-(student, school) pair at this level whose pinning
        keeps the residual solvable at the level, then rebuild the sweep
        state as of the start of the tied value group.

        Only reachable with duplicated utilities; tie-free instances always
        have singleton groups.
        """
        u = self.instance.utilities
        candidates = sorted(
            (i, j)
            for (v, i, j) in self.pairs[group_start:group_end]
            if not self.fixed[i]
        )
        chosen = None
        for ci, cj in candidates:
            if self._residual_feasible_at(value, extra_student=ci, extra_school=cj):
                chosen = (ci, cj)
                break
        assert chosen is not None, "bottleneck level admits no feasible pin"
        ci, cj = chosen
        if self.matched[ci] != -1:
            self.roster[self.matched[ci]].remove(ci)
        self._pin(ci, cj, u[ci][cj])
        # Rebuild the matching and prefixes as of the group boundary so the
        # remaining tied pairs are processed again at the new level.
        self._rebuild_at(group_start)
        return group_start

    def _residual_feasible_at(self, value: float, extra_student: int, extra_school: int) -> bool:
        """Would pinning (extra_student, extra_school) leave a level-`value`
        matching for all remaining levels?"""
        u = self.instance.utilities
        caps_eff = list(self.caps)
        for i in range(self.n):
            if self.fixed[i]:
                caps_eff[self.matched[i]] -= 1
        caps_eff[extra_school] -= 1
        if caps_eff[extra_school] < 0:
            return False
        active = [
            i for i in range(self.n) if not self.fixed[i] and i != extra_student
        ]
        adjacency = [
            [j for j in range(self.m) if u[i][j] >= value] for i in active
        ]
        size = _kuhn_size(len(active), caps_eff, adjacency)
        # One seat and one level go to the candidate itself.
        return size == self.instance.max_cardinality - self.fixes - 1

    def _rebuild_at(self, group_start: int) -> None:
        u = self.instance.utilities
        level = self.pairs[group_start][0]
        counts = [0] * self.n
        rcounts = [0] * self.m
        for v, i, j in self.pairs[group_start:]:
            counts[i] += 1
            rcounts[j] += 1
        self.adm_len = counts
        self.radm_len = rcounts
        pinned_school = list(self.matched)  # pins survive the rebuild
        self.matched = [-1] * self.n
        self.roster = [[] for _ in range(self.m)]
        for i in range(self.n):
            if self.fixed[i]:
                self.matched[i] = pinned_school[i]
                self.roster[pinned_school[i]].append(i)
        # Fresh matching over active students at the group level.
        active = [i for i in range(self.n) if not self.fixed[i]]
        adjacency = {i: [j for j in range(self.m) if u[i][j] >= level] for i in active}
        size = 0
        for i in active:
            self.epoch += 1
            if self._forward_at(i, adjacency):
                size += 1
        assert size == self.instance.max_cardinality - self.fixes, (
            "residual matching lost cardinality after a tied pin"
        )

    def _forward_at(self, x: int, adjacency: dict[int, list[int]]) -> bool:
        for j in adjacency[x]:
            if self.visited[j] == self.epoch:
                continue
            self.visited[j] = self.epoch
            if self._seats_free(j) > 0:
                self.roster[j].append(x)
                self.matched[x] = j
                return True
            for y in self.roster[j]:
                if not self.fixed[y] and self._forward_at(y, adjacency):
                    self.roster[j].remove(y)
                    self.roster[j].append(x)
                    self.matched[x] = j
                    return True
        return False


def max_min_lex(instance: Instance) -> tuple[Allocation, SolverTrace]:
    """Egalitarian allocation: assign min(students, total capacity) students
    so that the ascending-sorted utility vector is lexicographically maximal
    from the bottom.

    Realized by iterated bottleneck search: the best attainable worst level
    is found, the pair attaining it is pinned, and the residual problem is
    re-solved above that level.  On tie-free instances the pinned pair is
    unique at every level and the resulting vector is exactly the
    lex-from-bottom maximum.  With duplicated utilities each pinned level
    still equals the residual bottleneck value and the result is
    deterministic (lowest-student, lowest-school pin among the tied pairs
    that keep the level attainable), but levels beyond the tie may be
    conservative: choosing among tied pins optimally is out of scope.

    The trace records every feasibility probe the sweep actually performed
    and one fix event per level, in execution order.
    """
    return _BottleneckSweep(instance).run()


# ---------------------------------------------------------------------------
# Allocation wire format
# ---------------------------------------------------------------------------


def allocation_to_json(
    instance: Instance, allocation: Allocation, algorithm: str
) -> dict[str, Any]:
    """The allocation output document: assignment array (null = unassigned),
    the algorithm name, and realized utilities ("-inf" for unassigned)."""
    vector = realized_utilities(instance, allocation)
    return {
        "assignment": list(allocation.assignment),
        "algorithm": algorithm,
        "utilities": [u if u is not NEG_INF else "-inf" for u in vector.entries],
    }


def allocation_from_json(doc: dict, n_schools: int) -> tuple[Allocation, str]:
    """Parse an allocation document; utilities are recomputed downstream and
    the stored ones ignored."""
    from .errors import InstanceFormatError

    if not isinstance(doc, dict) or "assignment" not in doc:
        raise InstanceFormatError("allocation document must contain an 'assignment' array")
    assignment = doc["assignment"]
    if not isinstance(assignment, list) or not all(
        a is None or (isinstance(a, int) and not isinstance(a, bool)) for a in assignment
    ):
        raise InstanceFormatError("'assignment' must be an array of school indices or nulls")
    algorithm = doc.get("algorithm", "unknown")
    allocation = Allocation.from_assignment(assignment, n_schools)
    return allocation, algorithm
