"""Command-line front end.

Subcommands: generate, solve, audit, verify, render, metrics.  Every input
and output path accepts ``-`` for stdin/stdout, and commands compose into
shell pipelines:

    lexmatch generate spatial --grid 50 --schools 15 --seed 42 \
        | lexmatch solve max-max-lex \
        | lexmatch audit

File outputs use the exact per-artifact formats (instance document,
allocation document, geometry sidecar, SVG, CSV).  Streamed output instead
wraps the pieces in one envelope object -- ``{"instance": ..., "spatial":
..., "allocation": ..., "trace": ...}`` -- that downstream commands accept
anywhere they accept a bare document, so geometry survives a pipe without
temp files.

Exit codes: 0 success (audit: stable), 1 audit found blocking pairs or
verify found a counterexample, 2 bad parameters, unparsable or infeasible
input, 3 verification budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import find_blocking_pairs, metrics
from .core import (
    Allocation,
    Instance,
    instance_from_json,
    realized_utilities,
    serialize_instance,
)
from .errors import (
    BudgetExceeded,
    InstanceFormatError,
    MatchingError,
    UndefinedGini,
)
from .oracle import (
    EnumerationBudget,
    brute_force_lex_bottom,
    brute_force_lex_top,
    brute_force_stable,
    definition_blocking_exists,
)
from .solvers import (
    allocation_from_json,
    allocation_to_json,
    deferred_acceptance,
    max_max_lex,
    max_min_lex,
)
from . import spatial as sp

ALGORITHMS = {
    "max-max-lex": max_max_lex,
    "da": deferred_acceptance,
    "max-min-lex": max_min_lex,
}


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2)


def _load_doc(path: str) -> dict:
    text = _read_text(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"invalid JSON in {path}: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{path}: expected a JSON object")
    return doc


def _is_envelope(doc: dict) -> bool:
    return "instance" in doc


def _instance_from_doc(doc: dict, strict: bool) -> tuple[Instance, sp.SpatialInstance | None]:
    """Accept either a bare instance document or a pipeline envelope."""
    if _is_envelope(doc):
        instance = instance_from_json(doc["instance"], strict=strict)
        spa = sp.spatial_from_json(doc["spatial"]) if doc.get("spatial") else None
        if spa is not None:
            _check_spatial_matches(instance, spa)
        return instance, spa
    return instance_from_json(doc, strict=strict), None


def _check_spatial_matches(instance: Instance, spa: sp.SpatialInstance) -> None:
    if (
        spa.instance.n_students != instance.n_students
        or spa.instance.n_schools != instance.n_schools
        or spa.instance.capacities != instance.capacities
        or spa.instance.utilities != instance.utilities
    ):
        raise InstanceFormatError("geometry sidecar does not match the instance")


def _allocation_from_doc(doc: dict, instance: Instance) -> tuple[Allocation, str]:
    if _is_envelope(doc):
        if "allocation" not in doc:
            raise InstanceFormatError("pipeline document carries no allocation")
        doc = doc["allocation"]
    allocation, algorithm = allocation_from_json(doc, instance.n_schools)
    if len(allocation.assignment) != instance.n_students:
        raise InstanceFormatError(
            f"allocation covers {len(allocation.assignment)} students, "
            f"instance has {instance.n_students}"
        )
    from .core import check_feasible

    check_feasible(instance, allocation)
    return allocation, algorithm


def _instance_and_allocation(args, strict: bool):
    """The (instance, allocation) pair for audit/render/metrics: either two
    positional files or a single envelope (file or stdin)."""
    if args.allocation is not None:
        instance, spa = _instance_from_doc(_load_doc(args.input), strict)
        alloc_doc = _load_doc(args.allocation)
        allocation, algorithm = _allocation_from_doc(alloc_doc, instance)
        return instance, spa, allocation, algorithm
    doc = _load_doc(args.input)
    if not _is_envelope(doc):
        raise InstanceFormatError(
            "a single input must be a pipeline document with instance and allocation"
        )
    instance, spa = _instance_from_doc(doc, strict)
    allocation, algorithm = _allocation_from_doc(doc, instance)
    return instance, spa, allocation, algorithm


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.kind == "spatial":
        capacities = _parse_capacities(args.capacities)
        spatial = sp.generate_spatial(
            grid=args.grid,
            points=args.points,
            n_schools=args.schools,
            seed=args.seed,
            capacities=capacities,
            spread=args.spread,
        )
        instance = spatial.instance
        if args.sidecar:
            _write_text(args.sidecar, sp.serialize_spatial(spatial))
        if args.output == "-":
            envelope = {
                "instance": json.loads(serialize_instance(instance)),
                "spatial": sp.spatial_to_json(spatial),
            }
            _write_text("-", _dump(envelope))
        else:
            _write_text(args.output, serialize_instance(instance))
        return 0
    instance = sp.random_instance(
        args.students, args.schools, args.seed, capacities=_parse_capacities(args.capacities)
    )
    _write_text(args.output, serialize_instance(instance))
    return 0


def _parse_capacities(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise InstanceFormatError(
            f"capacities must be comma-separated integers, got {text!r}"
        ) from None


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    doc = _load_doc(args.input)
    instance, spatial = _instance_from_doc(doc, args.strict)
    allocation, trace = ALGORITHMS[args.algorithm](instance)
    alloc_doc = allocation_to_json(instance, allocation, args.algorithm)
    trace_doc = {"algorithm": trace.algorithm, "events": trace.to_json()}
    if args.output == "-":
        envelope = dict(doc) if _is_envelope(doc) else {"instance": doc}
        envelope["allocation"] = alloc_doc
        if args.trace:
            envelope["trace"] = trace_doc
        _write_text("-", _dump(envelope))
    else:
        _write_text(args.output, _dump(alloc_doc))
        if args.trace:
            _write_text(_trace_path(args.output), _dump(trace_doc))
    return 0


def _trace_path(output: str) -> str:
    path = Path(output)
    return str(path.with_name(path.stem + ".trace.json"))


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


def cmd_audit(args) -> int:
    instance, _, allocation, algorithm = _instance_and_allocation(args, args.strict)
    pairs = find_blocking_pairs(instance, allocation)
    try:
        metric_doc = metrics(instance, allocation).to_json()
    except UndefinedGini:
        metric_doc = None
    report = {
        "algorithm": algorithm,
        "stable": not pairs,
        "blocking_pairs": [p.to_json() for p in pairs],
        "metrics": metric_doc,
    }
    _write_text(args.output, _dump(report))
    return 0 if not pairs else 1


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    doc = _load_doc(args.input)
    instance, _ = _instance_from_doc(doc, args.strict)
    budget = EnumerationBudget(
        max_students=args.max_students, max_allocations=args.max_allocations
    )
    values = instance.all_values()
    tie_free = len(set(values)) == len(values)

    greedy_alloc, _ = max_max_lex(instance)
    da_alloc, _ = deferred_acceptance(instance)
    stable_set = brute_force_stable(instance, budget)
    top = brute_force_lex_top(instance, budget)

    checks: dict[str, bool] = {}
    checks["greedy_audit_clean"] = not find_blocking_pairs(instance, greedy_alloc)
    checks["greedy_oracle_clean"] = not definition_blocking_exists(
        instance, list(greedy_alloc.assignment)
    )
    if tie_free:
        checks["unique_stable"] = len(stable_set) == 1
        checks["greedy_is_stable_allocation"] = (
            len(stable_set) == 1 and stable_set[0].assignment == greedy_alloc.assignment
        )
        checks["da_equals_greedy"] = da_alloc.assignment == greedy_alloc.assignment
        checks["greedy_is_lex_top"] = top.assignment == greedy_alloc.assignment
        egal_alloc, _ = max_min_lex(instance)
        bottom = brute_force_lex_bottom(instance, budget)
        egal_vector = realized_utilities(instance, egal_alloc).sorted_ascending()
        oracle_vector = realized_utilities(instance, bottom).sorted_ascending()
        checks["egalitarian_is_lex_bottom"] = egal_vector == oracle_vector
        from .solvers import bottleneck_value

        n_gap = instance.n_students - instance.max_cardinality
        checks["bottleneck_matches_oracle"] = (
            bottleneck_value(instance).value == oracle_vector[n_gap]
            if instance.max_cardinality > 0
            else True
        )
    report = {
        "n_students": instance.n_students,
        "n_schools": instance.n_schools,
        "tie_free": tie_free,
        "checks": checks,
        "all_pass": all(checks.values()),
    }
    if not tie_free:
        report["note"] = "optimality checks need a tie-free instance; ran stability only"
    _write_text(args.output, _dump(report))
    return 0 if all(checks.values()) else 1


# ---------------------------------------------------------------------------
# render
# ---------------------------------------------------------------------------


def cmd_render(args) -> int:
    strict = args.strict
    if args.sidecar is not None:
        instance, _ = _instance_from_doc(_load_doc(args.input), strict)
        spatial = sp.parse_spatial(_read_text(args.sidecar))
        _check_spatial_matches(instance, spatial)
        if args.allocation is None:
            raise InstanceFormatError("render needs an allocation")
        allocation, _ = _allocation_from_doc(_load_doc(args.allocation), instance)
    else:
        instance, spatial, allocation, _ = _instance_and_allocation(args, strict)
    if spatial is None:
        raise InstanceFormatError(
            "render needs spatial geometry (a sidecar file or a pipeline document)"
        )
    svg = sp.render_territories_svg(spatial, allocation, cell_size_px=args.cell_size)
    _write_text(args.output, svg)
    if args.csv:
        _write_text(args.csv, sp.export_territories_csv(spatial, allocation))
    if args.figure:
        from .figures import save_figure, territory_figure

        save_figure(territory_figure(spatial, allocation), args.figure)
    return 0


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def cmd_metrics(args) -> int:
    instance, _, allocation, algorithm = _instance_and_allocation(args, args.strict)
    report = metrics(instance, allocation).to_json()
    report["algorithm"] = algorithm
    _write_text(args.output, _dump(report))
    if args.figure:
        from .figures import save_figure, utility_profile_figure

        save_figure(
            utility_profile_figure(instance, {algorithm: allocation}), args.figure
        )
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_strict_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--strict",
        dest="strict",
        action="store_true",
        default=True,
        help="reject duplicated utilities (default)",
    )
    group.add_argument(
        "--no-strict",
        dest="strict",
        action="store_false",
        help="permit ties, resolved toward lower student then school index",
    )


def _add_format_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=["json"],
        default="json",
        help="report format (json only)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexmatch",
        description="Solvers, audits and generators for many-to-one matching "
        "with aligned preferences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a new instance")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    gen_spatial = gen_sub.add_parser("spatial", help="unit-square distance instance")
    mode = gen_spatial.add_mutually_exclusive_group(required=True)
    mode.add_argument("--grid", type=int, help="students at the cells of an N x N lattice")
    mode.add_argument("--points", type=int, help="this many uniform student points")
    gen_spatial.add_argument("--schools", type=int, required=True)
    gen_spatial.add_argument("--seed", type=int, required=True)
    gen_spatial.add_argument(
        "--capacities", help="comma-separated per-school seats (default: split evenly)"
    )
    gen_spatial.add_argument(
        "--spread",
        type=float,
        default=0.0,
        help="capacity heterogeneity in [0,1]; 0 = even split (default)",
    )
    gen_spatial.add_argument("-o", "--output", default="-")
    gen_spatial.add_argument("--sidecar", help="also write the geometry sidecar here")
    gen_spatial.set_defaults(func=cmd_generate)
    gen_random = gen_sub.add_parser("random", help="uniform random utilities")
    gen_random.add_argument("--students", type=int, required=True)
    gen_random.add_argument("--schools", type=int, required=True)
    gen_random.add_argument("--seed", type=int, default=0)
    gen_random.add_argument(
        "--capacities", help="comma-separated per-school seats (default: random)"
    )
    gen_random.add_argument("-o", "--output", default="-")
    gen_random.set_defaults(func=cmd_generate)

    solve = sub.add_parser("solve", help="run an algorithm on an instance")
    solve.add_argument("algorithm", choices=sorted(ALGORITHMS))
    solve.add_argument("input", nargs="?", default="-")
    solve.add_argument("-o", "--output", default="-")
    solve.add_argument(
        "--trace",
        action="store_true",
        help="also emit the execution trace (embedded on stdout, "
        "<output>.trace.json next to a file)",
    )
    _add_strict_flags(solve)
    _add_format_flag(solve)
    solve.set_defaults(func=cmd_solve)

    audit = sub.add_parser(
        "audit", help="report blocking pairs and metrics; exit 1 when unstable"
    )
    audit.add_argument("input", nargs="?", default="-")
    audit.add_argument("allocation", nargs="?")
    audit.add_argument("-o", "--output", default="-")
    _add_strict_flags(audit)
    _add_format_flag(audit)
    audit.set_defaults(func=cmd_audit)

    verify = sub.add_parser(
        "verify", help="cross-check solver outputs against brute-force enumeration"
    )
    verify.add_argument("input", nargs="?", default="-")
    verify.add_argument("-o", "--output", default="-")
    verify.add_argument("--max-students", type=int, default=EnumerationBudget().max_students)
    verify.add_argument(
        "--max-allocations", type=int, default=EnumerationBudget().max_allocations
    )
    _add_strict_flags(verify)
    _add_format_flag(verify)
    verify.set_defaults(func=cmd_verify)

    render = sub.add_parser("render", help="territory SVG for grid instances")
    render.add_argument("input", nargs="?", default="-")
    render.add_argument("allocation", nargs="?")
    render.add_argument("--sidecar", help="geometry sidecar written by generate")
    render.add_argument("-o", "--output", default="-")
    render.add_argument("--cell-size", type=int, default=12, help="pixels per cell")
    render.add_argument("--csv", help="also export territory rows here")
    render.add_argument("--figure", help="also save a matplotlib scatter (png/pdf)")
    _add_strict_flags(render)
    render.set_defaults(func=cmd_render)

    met = sub.add_parser("metrics", help="inequality statistics of an allocation")
    met.add_argument("input", nargs="?", default="-")
    met.add_argument("allocation", nargs="?")
    met.add_argument("-o", "--output", default="-")
    met.add_argument("--figure", help="also save a sorted-utility profile figure")
    _add_strict_flags(met)
    _add_format_flag(met)
    met.set_defaults(func=cmd_metrics)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except MatchingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
