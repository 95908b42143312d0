"""Spatial instances on the unit square.

Students and schools are points in [0,1]^2 and a student's utility for a
school is sqrt(2) minus their Euclidean distance, so maximizing utility is
minimizing travel.  Students either sit at the cell centers of an n-by-n
lattice ("grid" mode, deterministic) or are drawn uniformly ("points"
mode); schools are always drawn uniformly.

Randomness comes from PCG64 (numpy's default bit generator).  A run seeds
``SeedSequence(seed)`` and spawns three child streams, used in this fixed
order: stream 0 for student points, stream 1 for school points, stream 2
for capacities.  Grid mode simply never draws from stream 0.  Any exact
utility tie (or a non-positive utility, possible only for opposite-corner
placements) is repaired by re-drawing the offending schools' coordinates
from stream 1, keeping the geometry honest instead of nudging the numbers.
Identical parameters and seed therefore give bit-identical instances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import Allocation, Instance, build_instance, check_feasible
from .errors import (
    CapacityMismatch,
    DimensionMismatch,
    IndifferenceViolation,
    InstanceFormatError,
    NotAGrid,
    TooManySchools,
)

__all__ = [
    "PALETTE",
    "SQRT2",
    "SpatialInstance",
    "generate_spatial",
    "random_instance",
    "proportional_capacities",
    "export_territories_csv",
    "render_territories_svg",
    "serialize_spatial",
    "parse_spatial",
]

SQRT2 = math.sqrt(2.0)

# Fill colors for territories, cycled by school index (20 distinct hues).
PALETTE = (
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
    "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
    "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f",
    "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
)

UNASSIGNED_FILL = "#ffffff"

_REPAIR_ATTEMPTS = 200


@dataclass(frozen=True)
class SpatialInstance:
    """A point geometry plus the Instance it induces.

    mode is "grid" (students at lattice cell centers, ``grid`` is the side
    length) or "points" (uniform draws, ``grid`` is None).
    """

    student_points: tuple[tuple[float, float], ...]
    school_points: tuple[tuple[float, float], ...]
    capacities: tuple[int, ...]
    mode: str
    grid: int | None
    instance: Instance

    @property
    def n_students(self) -> int:
        return len(self.student_points)

    @property
    def n_schools(self) -> int:
        return len(self.school_points)


def _distance_utilities(
    student_points, school_points
) -> list[list[float]]:
    return [
        [SQRT2 - math.hypot(sx - tx, sy - ty) for tx, ty in school_points]
        for sx, sy in student_points
    ]


def _collision_schools(matrix: list[list[float]]) -> set[int]:
    """Schools involved in any duplicated or non-positive utility."""
    seen: dict[float, tuple[int, int]] = {}
    bad: set[int] = set()
    for i, row in enumerate(matrix):
        for j, value in enumerate(row):
            if value <= 0.0:
                bad.add(j)
            prior = seen.get(value)
            if prior is not None:
                bad.add(j)
                bad.add(prior[1])
            else:
                seen[value] = (i, j)
    return bad


def proportional_capacities(
    n_students: int, n_schools: int, spread: float, rng: np.random.Generator
) -> list[int]:
    """Positive integer capacities summing to exactly n_students.

    spread = 0 splits as evenly as possible.  spread in (0, 1] first weights
    schools by uniform draws in [1-spread, 1+spread] (consuming n_schools
    draws from ``rng``), then rounds by largest remainder; every school
    keeps at least one seat.
    """
    if spread < 0.0 or spread > 1.0:
        raise CapacityMismatch(f"capacity spread must be in [0, 1], got {spread}")
    if spread == 0.0:
        weights = [1.0] * n_schools
    else:
        draws = rng.random(n_schools)
        weights = [1.0 + spread * (2.0 * d - 1.0) for d in draws]
    total_w = sum(weights)
    shares = [w / total_w * n_students for w in weights]
    caps = [max(1, int(share)) for share in shares]
    remainders = [
        (shares[j] - int(shares[j]), -j) for j in range(n_schools)
    ]
    # Largest remainder first; ties toward the lower school index.
    order = sorted(range(n_schools), key=lambda j: remainders[j], reverse=True)
    k = 0
    while sum(caps) < n_students:
        caps[order[k % n_schools]] += 1
        k += 1
    k = 0
    while sum(caps) > n_students:
        j = order[-1 - (k % n_schools)]
        if caps[j] > 1:
            caps[j] -= 1
        k += 1
    if sum(caps) != n_students:
        raise CapacityMismatch(
            f"proportional capacities sum to {sum(caps)}, need {n_students}"
        )
    return caps


def generate_spatial(
    *,
    grid: int | None = None,
    points: int | None = None,
    n_schools: int,
    seed: int,
    capacities: list[int] | None = None,
    spread: float = 0.0,
) -> SpatialInstance:
    """Build a strict spatial instance.

    Exactly one of ``grid`` (students at the cell centers of a grid x grid
    lattice, row-major from the bottom-left) or ``points`` (that many
    uniform student points) must be given.  Omitting ``capacities`` splits
    exactly n_students seats across schools (see
    :func:`proportional_capacities`); an explicit list is taken as-is, and
    may deliberately under- or over-provision.
    """
    if (grid is None) == (points is None):
        raise DimensionMismatch("exactly one of grid or points must be given")
    if grid is not None:
        if grid < 1:
            raise DimensionMismatch(f"grid side must be at least 1, got {grid}")
        n_students = grid * grid
    else:
        if points < 1:
            raise DimensionMismatch(f"points must be at least 1, got {points}")
        n_students = points
    if n_schools > n_students:
        raise TooManySchools(
            f"{n_schools} schools for {n_students} students"
        )

    streams = np.random.SeedSequence(seed).spawn(3)
    student_rng = np.random.default_rng(streams[0])
    school_rng = np.random.default_rng(streams[1])
    cap_rng = np.random.default_rng(streams[2])

    if grid is not None:
        student_points = tuple(
            ((ix + 0.5) / grid, (iy + 0.5) / grid)
            for iy in range(grid)
            for ix in range(grid)
        )
    else:
        draws = student_rng.random((n_students, 2))
        student_points = tuple((float(x), float(y)) for x, y in draws)

    school_draws = school_rng.random((n_schools, 2))
    school_points = [(float(x), float(y)) for x, y in school_draws]

    if capacities is None:
        caps = proportional_capacities(n_students, n_schools, spread, cap_rng)
    else:
        caps = list(capacities)

    # Strictness repair: re-draw any school whose column collides.
    matrix = _distance_utilities(student_points, school_points)
    for _ in range(_REPAIR_ATTEMPTS):
        bad = _collision_schools(matrix)
        if not bad:
            break
        for j in sorted(bad):
            x, y = school_rng.random(2)
            school_points[j] = (float(x), float(y))
        matrix = _distance_utilities(student_points, school_points)

    instance = build_instance(n_students, n_schools, caps, matrix, strict=True)
    return SpatialInstance(
        student_points=student_points,
        school_points=tuple(school_points),
        capacities=tuple(caps),
        mode="grid" if grid is not None else "points",
        grid=grid,
        instance=instance,
    )


def random_instance(
    n_students: int,
    n_schools: int,
    seed: int,
    capacities: list[int] | None = None,
) -> Instance:
    """A strict instance with uniform utilities in (0, 1).

    Seeds ``SeedSequence(seed)`` and spawns two streams: stream 0 for the
    utility matrix, stream 1 for capacities (skipped when explicit
    capacities are given).  Random capacities land in [1, n/m + 1], so both
    scarce and surplus regimes occur.
    """
    if n_schools > n_students:
        raise TooManySchools(f"{n_schools} schools for {n_students} students")
    streams = np.random.SeedSequence(seed).spawn(2)
    value_rng = np.random.default_rng(streams[0])
    cap_rng = np.random.default_rng(streams[1])
    if capacities is None:
        caps = [
            int(c)
            for c in cap_rng.integers(
                1, n_students // n_schools + 2, size=n_schools
            )
        ]
    else:
        caps = list(capacities)
    for _ in range(_REPAIR_ATTEMPTS):
        matrix = value_rng.random((n_students, n_schools)).tolist()
        flat = [v for row in matrix for v in row]
        if min(flat) > 0.0 and len(set(flat)) == len(flat):
            return build_instance(n_students, n_schools, caps, matrix, strict=True)
    raise IndifferenceViolation(
        "could not draw a tie-free utility matrix", collisions=[]
    )


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    """Shortest exact decimal; integral values drop the trailing .0."""
    if x == int(x):
        return str(int(x))
    return repr(float(x))


def export_territories_csv(spatial: SpatialInstance, allocation: Allocation) -> str:
    """Two CSV sections: student rows ``x,y,school_index`` (empty index for
    unassigned students) in student order, then school rows
    ``school_index,x,y,capacity``."""
    check_feasible(spatial.instance, allocation)
    lines = ["x,y,school_index"]
    for i, (x, y) in enumerate(spatial.student_points):
        j = allocation.assignment[i]
        lines.append(f"{_fmt(x)},{_fmt(y)},{'' if j is None else j}")
    lines.append("school_index,x,y,capacity")
    for j, (x, y) in enumerate(spatial.school_points):
        lines.append(f"{j},{_fmt(x)},{_fmt(y)},{spatial.capacities[j]}")
    return "\n".join(lines) + "\n"


def render_territories_svg(
    spatial: SpatialInstance, allocation: Allocation, cell_size_px: int = 12
) -> str:
    """Territory map as SVG 1.1: one unit square per student cell filled by
    the assigned school's palette color (white when unassigned), school
    locations as black dots on top.

    Only grid-mode instances tile the square; points-mode instances raise
    NotAGrid (plot those as scatter points instead, e.g. via the figures
    module).  Output is byte-deterministic for fixed inputs.
    """
    if spatial.mode != "grid" or spatial.grid is None:
        raise NotAGrid("territory tiles need a grid-mode spatial instance")
    check_feasible(spatial.instance, allocation)
    n = spatial.grid
    side = n * cell_size_px
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{side}" height="{side}" viewBox="0 0 {n} {n}" '
        f'shape-rendering="crispEdges">\n'
    ]
    for i, (x, y) in enumerate(spatial.student_points):
        ix = int(x * n)
        iy = int(y * n)
        j = allocation.assignment[i]
        fill = UNASSIGNED_FILL if j is None else PALETTE[j % len(PALETTE)]
        out.append(
            f'<rect x="{ix}" y="{n - 1 - iy}" width="1" height="1" '
            f'fill="{fill}"/>\n'
        )
    for x, y in spatial.school_points:
        out.append(
            f'<circle cx="{_fmt(x * n)}" cy="{_fmt((1.0 - y) * n)}" '
            f'r="0.35" fill="#000000"/>\n'
        )
    out.append("</svg>\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# Sidecar wire format
# ---------------------------------------------------------------------------


def spatial_to_json(spatial: SpatialInstance) -> dict:
    return {
        "mode": spatial.mode,
        "grid": spatial.grid,
        "student_points": [list(p) for p in spatial.student_points],
        "school_points": [list(p) for p in spatial.school_points],
        "capacities": list(spatial.capacities),
    }


def serialize_spatial(spatial: SpatialInstance) -> str:
    """Geometry sidecar: everything needed to rebuild the spatial instance
    (utilities are re-derived from the coordinates)."""
    return json.dumps(spatial_to_json(spatial), indent=2) + "\n"


def spatial_from_json(doc: dict) -> SpatialInstance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("spatial sidecar must be a JSON object")
    for key in ("mode", "student_points", "school_points", "capacities"):
        if key not in doc:
            raise InstanceFormatError(f"spatial sidecar missing field {key!r}")
    mode = doc["mode"]
    if mode not in ("grid", "points"):
        raise InstanceFormatError(f"unknown spatial mode {mode!r}")
    grid = doc.get("grid")
    if mode == "grid" and (not isinstance(grid, int) or isinstance(grid, bool)):
        raise InstanceFormatError("grid mode requires an integer 'grid' side")
    if mode == "points":
        grid = None

    def _points(field: str) -> tuple[tuple[float, float], ...]:
        raw = doc[field]
        if not isinstance(raw, list):
            raise InstanceFormatError(f"{field} must be an array")
        pts = []
        for entry in raw:
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(
                    isinstance(c, (int, float)) and not isinstance(c, bool)
                    for c in entry
                )
            ):
                raise InstanceFormatError(f"{field} entries must be [x, y] pairs")
            x, y = float(entry[0]), float(entry[1])
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise InstanceFormatError(f"{field} coordinates must lie in [0, 1]")
            pts.append((x, y))
        return tuple(pts)

    student_points = _points("student_points")
    school_points = _points("school_points")
    caps = doc["capacities"]
    if not isinstance(caps, list) or not all(
        isinstance(c, int) and not isinstance(c, bool) for c in caps
    ):
        raise InstanceFormatError("capacities must be an array of integers")
    if mode == "grid" and len(student_points) != grid * grid:
        raise InstanceFormatError(
            f"grid {grid} implies {grid * grid} students, sidecar has {len(student_points)}"
        )
    matrix = _distance_utilities(student_points, school_points)
    instance = build_instance(
        len(student_points), len(school_points), caps, matrix, strict=False
    )
    return SpatialInstance(
        student_points=student_points,
        school_points=school_points,
        capacities=tuple(caps),
        mode=mode,
        grid=grid,
        instance=instance,
    )


def parse_spatial(text: str) -> SpatialInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"not valid JSON: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc
    return spatial_from_json(doc)
