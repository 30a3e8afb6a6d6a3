"""Sparse filtered Dowker nerves with verified persistence guarantees."""

from .extreal import INF, format_scale, parse_scale
from .dissimilarity import (DowkerDissimilarity, SampleOrder, TruncationFunction,
                            from_distance_matrix, from_point_cloud,
                            farthest_point_sample, cover_dissimilarity,
                            alpha_insertion_radius, metric_truncation, truncate,
                            truncation_grid, validate_truncation)
from .translations import (MonotoneMap, TranslationFunction, linear, identity,
                           multiplicative, additive, id_plus_beta, evaluate,
                           evaluate_array, generalized_inverse, translation_inverse,
                           compose)
from .nerve import (Simplex, FilteredComplex, ParentFunction, RestrictionFunction,
                    SparsificationPlan, BudgetExceededError, DEFAULT_SIMPLEX_BUDGET,
                    identity_plan, is_parent_function, nerve_value, sparse_nerve_value,
                    build_filtered_complex, canonical_restriction, build_parent_function,
                    parent_restriction, sheehy_restriction, validate_restriction)
from .persistence import PersistenceDiagram, compute_diagram, betti_at
from .interleave import (MatchingCertificate, MatchingFailure, alpha_trivial,
                         find_matching, check_certificate)
from .oracle import (InstanceSpec, CheckReport, brute_force_nerve,
                     check_sparsification, check_truncation,
                     search_naive_truncation_failure)

__all__ = [
    "INF", "format_scale", "parse_scale",
    "DowkerDissimilarity", "SampleOrder", "TruncationFunction",
    "from_distance_matrix", "from_point_cloud", "farthest_point_sample",
    "cover_dissimilarity", "alpha_insertion_radius", "metric_truncation",
    "truncate", "truncation_grid", "validate_truncation",
    "MonotoneMap", "TranslationFunction", "linear", "identity", "multiplicative",
    "additive", "id_plus_beta", "evaluate", "evaluate_array",
    "generalized_inverse", "translation_inverse", "compose",
    "Simplex", "FilteredComplex", "ParentFunction", "RestrictionFunction",
    "SparsificationPlan", "BudgetExceededError", "DEFAULT_SIMPLEX_BUDGET",
    "identity_plan", "is_parent_function", "nerve_value", "sparse_nerve_value",
    "build_filtered_complex", "canonical_restriction", "build_parent_function",
    "parent_restriction", "sheehy_restriction", "validate_restriction",
    "PersistenceDiagram", "compute_diagram", "betti_at",
    "MatchingCertificate", "MatchingFailure", "alpha_trivial", "find_matching",
    "check_certificate",
    "InstanceSpec", "CheckReport", "brute_force_nerve", "check_sparsification",
    "check_truncation", "search_naive_truncation_failure",
]

__version__ = "0.1.0"
