"""Derivative-free direct search on embedded manifolds.

Polling-set constructions with exact cosine and complexity measures, a
sufficient-decrease direct-search solver with retractions, closed-form
sphere analysis for projected polling sets, and a seeded benchmark harness
with data profiles.
"""

from ._backend import BACKEND
from .bench import (FAMILIES, BenchRecord, ProblemSpec, data_profile,
                    default_strategies, generate_instance, head_to_head,
                    run_grid, solver_id)
from .geometry import (BasisError, EmbeddedSphere, GeometryError, Manifold,
                       Point, Subspace, Tangent, UnitSphere,
                       manifold_from_json)
from .pss import (GENERATORS, EnumerationBudgetError, EuclideanPSS,
                  MeasureReport, NotPositiveSpanningError, build_pss,
                  complexity_measure, cosine_measure_exact,
                  cosine_measure_sampled, pss_from_json, pss_minimal_sum,
                  pss_plus_minus, pss_uniform_angles, random_rotation)
from .solver import (IterationRecord, Problem, SolverConfig, SolverTrace,
                     diagnostic_step_square_sum,
                     diagnostic_unsuccessful_bound, direct_search,
                     iteration_rng)
from .sphere import (SphereCmResult, cm_projected_plusminus_exact,
                     cm_range_scan, corollary_53_table, cross_check_generic,
                     special_point, special_point_cm, sphere_heatmap)
from .tangent import (EmptyProjectionError, FamilyComplexity,
                      PollingStrategy, TangentPollingSet, intrinsic_pss,
                      manifold_complexity_measure, projected_pss,
                      tangent_cosine_measure)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BasisError", "BenchRecord", "EmbeddedSphere",
    "EmptyProjectionError", "EnumerationBudgetError", "EuclideanPSS",
    "FAMILIES", "FamilyComplexity", "GENERATORS", "GeometryError",
    "IterationRecord", "Manifold", "MeasureReport",
    "NotPositiveSpanningError", "Point", "PollingStrategy", "Problem",
    "ProblemSpec", "SolverConfig", "SolverTrace", "SphereCmResult",
    "Subspace", "Tangent", "TangentPollingSet", "UnitSphere", "build_pss",
    "cm_projected_plusminus_exact", "cm_range_scan", "complexity_measure",
    "corollary_53_table", "cosine_measure_exact", "cosine_measure_sampled",
    "cross_check_generic", "data_profile", "default_strategies",
    "diagnostic_step_square_sum", "diagnostic_unsuccessful_bound",
    "direct_search", "generate_instance", "head_to_head", "intrinsic_pss",
    "iteration_rng", "manifold_complexity_measure", "manifold_from_json",
    "projected_pss", "pss_from_json", "pss_minimal_sum", "pss_plus_minus",
    "pss_uniform_angles", "random_rotation", "run_grid", "solver_id",
    "special_point", "special_point_cm", "sphere_heatmap",
    "tangent_cosine_measure",
]
