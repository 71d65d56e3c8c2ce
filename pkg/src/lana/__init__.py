"""Latency-budgeted layer-replacement search.

Given per-layer tables of candidate operations, each scored by its
training-loss change relative to the teacher op and costed by measured
latency, this package finds K diverse replacement architectures under a
latency budget with an exact branch-and-bound solver, plus the tooling
used to evaluate them: ranking, rank correlation, op statistics and a
seeded random baseline.
"""

from .core import (
    Budget,
    CandidateOp,
    InvalidSelectionError,
    LayerTable,
    SearchInstance,
    Selection,
    budget_from_ratio,
    cost,
    objective,
    overlap,
    teacher_cost,
    teacher_selection,
    validate_instance,
)
from .lut_io import (
    InstanceDocument,
    InstanceSyntaxError,
    InstanceValidationError,
    MeasurementSample,
    SchemaError,
    aggregate_samples,
    parse_document,
    parse_instance,
    restrict_pool,
    write_instance,
)
from .solver import (
    SolveReport,
    SolveResult,
    SolverConfig,
    dominance_frontier,
    lp_bound,
    solve,
    solve_k_diverse,
)
from .analysis import (
    DegenerateRankingError,
    OpHistogram,
    RankedCandidates,
    kendall_tau,
    proxy_correlation_report,
    rank_candidates,
    selection_histogram,
)
from .baselines import (
    RandomSearchResult,
    SamplerConfig,
    SamplingError,
    random_search,
    sample_feasible,
)

__all__ = [
    "Budget",
    "CandidateOp",
    "DegenerateRankingError",
    "InstanceDocument",
    "InstanceSyntaxError",
    "InstanceValidationError",
    "InvalidSelectionError",
    "LayerTable",
    "MeasurementSample",
    "OpHistogram",
    "RandomSearchResult",
    "RankedCandidates",
    "SamplerConfig",
    "SamplingError",
    "SchemaError",
    "SearchInstance",
    "Selection",
    "SolveReport",
    "SolveResult",
    "SolverConfig",
    "aggregate_samples",
    "budget_from_ratio",
    "cost",
    "dominance_frontier",
    "kendall_tau",
    "lp_bound",
    "objective",
    "overlap",
    "parse_document",
    "parse_instance",
    "proxy_correlation_report",
    "random_search",
    "rank_candidates",
    "restrict_pool",
    "sample_feasible",
    "selection_histogram",
    "solve",
    "solve_k_diverse",
    "teacher_cost",
    "teacher_selection",
    "validate_instance",
    "write_instance",
]
