"""fpcluster: image clustering via 2D functional PCA and randomized
leverage-score feature selection.

The pipeline: decode grayscale images, expand each one in a tensor-product
Fourier basis, extract functional principal component scores, optionally
select a provably small random subset of feature columns, and cluster with
k-means or normalized spectral clustering.  Evaluation utilities align
clusters to ground-truth groups and audit published accuracy tables.
"""

from .basis import BasisConfig, BasisMatrix, evaluate_basis, fit_coefficients, synthesize_image
from .clustering import (
    ClusterAssignment,
    KmeansConfig,
    SpectralConfig,
    kmeans,
    objective_frobenius,
    objective_sumsq,
    run_kmeans,
    spectral,
)
from .evaluation import (
    EvaluationReport,
    align_and_score,
    consistency_check,
    format_report,
)
from .fpca import FpcaModel, fit_fpca, load_model, reconstruct, save_model, transform
from .image_io import Dataset, ImageGrid, load_manifest, read_pgm, write_manifest, write_pgm
from .selection import (
    FeatureMatrix,
    SelectionDiagnostics,
    SelectionPlan,
    approx_top_right_singular_vectors,
    bound_diagnostics,
    exact_kmeans_optimum,
    leverage_probabilities,
    load_plan,
    sample_features,
    save_plan,
    select,
    selected_feature_count,
    sketch_for_plan,
)
from .synthetic import PlantedSpec, planted_features, planted_images

__version__ = "0.1.0"

__all__ = [
    "BasisConfig",
    "BasisMatrix",
    "ClusterAssignment",
    "Dataset",
    "EvaluationReport",
    "FeatureMatrix",
    "FpcaModel",
    "ImageGrid",
    "KmeansConfig",
    "PlantedSpec",
    "SelectionDiagnostics",
    "SelectionPlan",
    "SpectralConfig",
    "align_and_score",
    "approx_top_right_singular_vectors",
    "bound_diagnostics",
    "consistency_check",
    "evaluate_basis",
    "exact_kmeans_optimum",
    "fit_coefficients",
    "fit_fpca",
    "format_report",
    "kmeans",
    "leverage_probabilities",
    "load_manifest",
    "load_model",
    "load_plan",
    "objective_frobenius",
    "objective_sumsq",
    "planted_features",
    "planted_images",
    "read_pgm",
    "reconstruct",
    "run_kmeans",
    "sample_features",
    "save_model",
    "save_plan",
    "select",
    "selected_feature_count",
    "sketch_for_plan",
    "spectral",
    "synthesize_image",
    "transform",
    "write_manifest",
    "write_pgm",
]
