"""Many-to-one matching with aligned preferences.

Students and schools share one utility matrix: a school values a set of
students by the sum of their utilities for it, so both sides rank any
student-school pair identically.  The package provides the greedy stable
solver (best pair first), a deferred-acceptance baseline, an egalitarian
bottleneck solver, stability audits, inequality metrics, brute-force
oracles for small instances, and spatial instance generation with
territory exports.
"""

from .core import (
    NEG_INF,
    Allocation,
    Instance,
    UtilityVector,
    build_instance,
    check_feasible,
    instance_from_json,
    parse_instance,
    realized_utilities,
    serialize_instance,
)
from .errors import (
    BudgetExceeded,
    CapacityMismatch,
    DimensionMismatch,
    IndifferenceViolation,
    InfeasibleAllocation,
    InstanceFormatError,
    LengthMismatch,
    MatchingError,
    NonPositiveCapacity,
    NonPositiveUtility,
    NotAGrid,
    TooManySchools,
    UndefinedGini,
)
from .analysis import (
    EQUAL,
    FIRST_GREATER,
    SECOND_GREATER,
    BlockingPair,
    MetricsReport,
    find_blocking_pairs,
    is_stable,
    lex_compare_bottom,
    lex_compare_top,
    metrics,
)
from .solvers import (
    DARound,
    FixEvent,
    MatchEvent,
    ProbeEvent,
    SolverTrace,
    Threshold,
    allocation_from_json,
    allocation_to_json,
    bottleneck_value,
    deferred_acceptance,
    feasible_above,
    max_max_lex,
    max_min_lex,
    replay_match_events,
)
from .oracle import (
    EnumerationBudget,
    brute_force_lex_bottom,
    brute_force_lex_top,
    brute_force_stable,
    definition_blocking_exists,
    enumerate_feasible,
)
from .spatial import (
    PALETTE,
    SQRT2,
    SpatialInstance,
    export_territories_csv,
    generate_spatial,
    parse_spatial,
    proportional_capacities,
    random_instance,
    render_territories_svg,
    serialize_spatial,
)

__version__ = "0.1.0"

__all__ = [
    "NEG_INF",
    "Allocation",
    "Instance",
    "UtilityVector",
    "build_instance",
    "check_feasible",
    "instance_from_json",
    "parse_instance",
    "realized_utilities",
    "serialize_instance",
    "BudgetExceeded",
    "CapacityMismatch",
    "DimensionMismatch",
    "IndifferenceViolation",
    "InfeasibleAllocation",
    "InstanceFormatError",
    "LengthMismatch",
    "MatchingError",
    "NonPositiveCapacity",
    "NonPositiveUtility",
    "NotAGrid",
    "TooManySchools",
    "UndefinedGini",
    "EQUAL",
    "FIRST_GREATER",
    "SECOND_GREATER",
    "BlockingPair",
    "MetricsReport",
    "find_blocking_pairs",
    "is_stable",
    "lex_compare_bottom",
    "lex_compare_top",
    "metrics",
    "DARound",
    "FixEvent",
    "MatchEvent",
    "ProbeEvent",
    "SolverTrace",
    "Threshold",
    "allocation_from_json",
    "allocation_to_json",
    "bottleneck_value",
    "deferred_acceptance",
    "feasible_above",
    "max_max_lex",
    "max_min_lex",
    "replay_match_events",
    "EnumerationBudget",
    "brute_force_lex_bottom",
    "brute_force_lex_top",
    "brute_force_stable",
    "definition_blocking_exists",
    "enumerate_feasible",
    "PALETTE",
    "SQRT2",
    "SpatialInstance",
    "export_territories_csv",
    "generate_spatial",
    "parse_spatial",
    "proportional_capacities",
    "random_instance",
    "render_territories_svg",
    "serialize_spatial",
    "__version__",
]
