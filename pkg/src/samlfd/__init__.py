"""Similarity-aware multi-representational learning from demonstration.

Given a single demonstrated trajectory, reproduce it from new boundary
conditions with several representations, score the reproductions under a
similarity metric over a grid of candidate points, and expose the per-point
best representation as a queryable similarity region.
"""

from .bias import BiasRecord, categorize_metric, run_bias_study, run_bias_suite
from .engine import (
    Meshgrid,
    RegionModel,
    ReproductionResult,
    SimilarityMap,
    accumulated_similarity_difference,
    best_reproduction,
    build_meshgrid,
    combine_best,
    evaluate_grid,
    fit_region_classifier,
    predict_representation,
    robust_region,
    session_document,
)
from .errors import (
    ComputationError,
    DimensionMismatchError,
    NonFiniteValueError,
    SamlfdError,
    TrajectoryParseError,
    ValidationError,
)
from .metrics import MetricId, distance, normalize_similarities
from .representations import (
    DMPConfig,
    DMPModel,
    JAModel,
    LTEModel,
    RepresentationConfig,
    REPRESENTATION_ORDER,
    build_reproducers,
    dmp_fit,
    dmp_reproduce,
    ja_reproduce,
    lte_reproduce,
)
from .shapes import BUNDLED_SHAPE_NAMES, bundled_shape, bundled_shapes
from .trajectory import (
    BoundaryConstraint,
    Trajectory,
    arc_length,
    preprocess,
    resample_uniform,
    smooth_moving_average,
)

__version__ = "0.1.0"

__all__ = [
    "BiasRecord",
    "BoundaryConstraint",
    "BUNDLED_SHAPE_NAMES",
    "ComputationError",
    "DimensionMismatchError",
    "DMPConfig",
    "DMPModel",
    "JAModel",
    "LTEModel",
    "Meshgrid",
    "MetricId",
    "NonFiniteValueError",
    "RegionModel",
    "RepresentationConfig",
    "REPRESENTATION_ORDER",
    "ReproductionResult",
    "SamlfdError",
    "SimilarityMap",
    "Trajectory",
    "TrajectoryParseError",
    "ValidationError",
    "accumulated_similarity_difference",
    "arc_length",
    "best_reproduction",
    "build_meshgrid",
    "build_reproducers",
    "bundled_shape",
    "bundled_shapes",
    "categorize_metric",
    "combine_best",
    "distance",
    "dmp_fit",
    "dmp_reproduce",
    "evaluate_grid",
    "fit_region_classifier",
    "ja_reproduce",
    "lte_reproduce",
    "normalize_similarities",
    "predict_representation",
    "preprocess",
    "resample_uniform",
    "robust_region",
    "run_bias_study",
    "run_bias_suite",
    "session_document",
    "smooth_moving_average",
]
