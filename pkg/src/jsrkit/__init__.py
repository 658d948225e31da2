"""Certified bounds on the joint spectral radius of finite sets of
nonnegative matrices.

The pipeline: a MatrixSet feeds a dependency graph (components, periods),
a NormTable of per-length product maxima built with domination pruning,
and a BoundsReport bracketing the radius with certificates.  A brute
oracle and sequence diagnostics cross-check everything on small inputs.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundsReport,
    Certificate,
    best_bracket,
    component_sandwich,
    diag_lower,
    m_indices,
    spectral_lower,
)
from .errors import (
    ComputeError,
    EmptySet,
    GuardExceeded,
    InputError,
    InvariantViolation,
    JsrkitError,
    MalformedInput,
    NegativeEntry,
    NonFiniteEntry,
    NotSupermultiplicative,
    PeriodOverflow,
    RequiresExact,
    ShapeMismatch,
)
from .graph import (
    UNREACHABLE,
    Condensation,
    DependencyGraph,
    PeriodInfo,
    build_graph,
    condense,
    global_period,
    is_radius_trivially_zero,
    periods,
    vertex_period,
)
from .matset import EntryStats, MatrixSet, from_csv, from_json, load, random_set
from .oracle import OracleEstimate, generalized_lower, single_spectral_radius
from .products import (
    Frontier,
    NormTable,
    ScaledProduct,
    brute_norm_table,
    extend,
    norm_table,
    seed_frontier,
)
from .sequences import (
    RatioCheck,
    SequenceDiagnosis,
    TraceLimit,
    bounded_ratio_check,
    fekete_check,
    fekete_check_log,
    growth_fit,
    trace_limit,
)

__all__ = [
    "__version__",
    "MatrixSet", "EntryStats", "from_json", "from_csv", "load", "random_set",
    "DependencyGraph", "Condensation", "PeriodInfo", "UNREACHABLE",
    "build_graph", "condense", "vertex_period", "global_period", "periods",
    "is_radius_trivially_zero",
    "ScaledProduct", "Frontier", "NormTable", "seed_frontier", "extend",
    "norm_table", "brute_norm_table",
    "BoundsReport", "Certificate", "best_bracket", "diag_lower",
    "spectral_lower", "component_sandwich", "m_indices",
    "OracleEstimate", "single_spectral_radius", "generalized_lower",
    "SequenceDiagnosis", "RatioCheck", "TraceLimit", "fekete_check",
    "fekete_check_log", "bounded_ratio_check", "trace_limit", "growth_fit",
    "JsrkitError", "InputError", "ComputeError", "NegativeEntry",
    "NonFiniteEntry", "ShapeMismatch", "MalformedInput", "EmptySet",
    "GuardExceeded", "PeriodOverflow", "RequiresExact",
    "NotSupermultiplicative", "InvariantViolation",
]
