"""Pruning-based Pareto front generation for mixed-discrete bi-objective
optimization: per-realization decomposition, utopia- and center-point
pruning, and an exhaustive oracle for validation."""

from .benchmarks import (
    REGISTRY,
    TrussConstants,
    get_problem,
    make_e1,
    make_e2,
    make_quad,
    make_toy_constrained,
    oracle_front,
)
from .core import (
    ObjectivePoint,
    ParetoSolution,
    ProblemSpec,
    Realization,
    dominates,
    nondominated_filter,
    weakly_dominates,
)
from .decomposition import (
    CapacityExceeded,
    Status,
    SubproblemRecord,
    build_subproblem_front,
    compute_anchors_utopia,
    compute_center,
    enumerate_realizations,
    index_of,
    realization_from_index,
)
from .pipeline import (
    NlpCounts,
    PhaseAResult,
    PipelineError,
    PruneReport,
    build_master_front,
    master_candidates,
    phase_a,
    phase_b,
    run_pipeline,
)
from .solver import (
    InfeasibleError,
    ScalarizedObjective,
    SolverConfig,
    SolveResult,
    reset_solve_count,
    solve_count,
    solve_scalarized,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityExceeded",
    "InfeasibleError",
    "NlpCounts",
    "ObjectivePoint",
    "ParetoSolution",
    "PhaseAResult",
    "PipelineError",
    "ProblemSpec",
    "PruneReport",
    "REGISTRY",
    "Realization",
    "ScalarizedObjective",
    "SolveResult",
    "SolverConfig",
    "Status",
    "SubproblemRecord",
    "TrussConstants",
    "build_master_front",
    "build_subproblem_front",
    "compute_anchors_utopia",
    "compute_center",
    "dominates",
    "enumerate_realizations",
    "get_problem",
    "index_of",
    "make_e1",
    "make_e2",
    "make_quad",
    "make_toy_constrained",
    "master_candidates",
    "nondominated_filter",
    "oracle_front",
    "phase_a",
    "phase_b",
    "realization_from_index",
    "reset_solve_count",
    "run_pipeline",
    "solve_count",
    "solve_scalarized",
    "weakly_dominates",
]
