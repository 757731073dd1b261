"""Graph-signal point-cloud features, saliency regression, and drop-N attacks.

The pipeline: build a kNN graph over a 3D point cloud, extract fourteen
per-point geometric features, relate them to adversarial saliency with a
no-intercept linear model, and remove the points the model ranks highest.
No classifier access is required at attack time.
"""

from .attack import (
    AttackResult,
    drop_attack,
    normalize_scores,
    overlap,
    predict_scores,
    random_drop,
    rank_top_n,
    synthetic_score_oracle,
)
from .features import (
    FEATURE_NAMES,
    FeatureMatrix,
    LpfConfig,
    ball_count,
    centroid_distance,
    extract_features,
    features_to_csv,
    lpf_distance_features,
    lpf_solve,
    local_variation,
    second_diff_coords,
    variation_smoothness,
    weighted_avg_coords,
)
from .graph import (
    NeighborhoodGraph,
    build_knn_graph,
    edge_list_text,
    laplacian_apply,
    transition_apply,
)
from .io import (
    NUM_FEATURES,
    CoefficientSet,
    PointCloud,
    ScoreVector,
    load_coefficients,
    normalize_cloud,
    parse_scores,
    parse_xyz,
    write_coefficients,
    write_scores,
    write_xyz,
)
from .presets import REFERENCE_R2_PERCENT, get_preset, preset_names
from .regression import (
    RegressionFit,
    TrainingSample,
    average_coefficients,
    fit_mlr,
    fit_report,
    select_top_targets,
)

__version__ = "0.1.0"

__all__ = [
    "AttackResult",
    "CoefficientSet",
    "FEATURE_NAMES",
    "FeatureMatrix",
    "LpfConfig",
    "NUM_FEATURES",
    "NeighborhoodGraph",
    "PointCloud",
    "REFERENCE_R2_PERCENT",
    "RegressionFit",
    "ScoreVector",
    "TrainingSample",
    "average_coefficients",
    "ball_count",
    "build_knn_graph",
    "centroid_distance",
    "drop_attack",
    "edge_list_text",
    "extract_features",
    "features_to_csv",
    "fit_mlr",
    "fit_report",
    "get_preset",
    "laplacian_apply",
    "load_coefficients",
    "local_variation",
    "lpf_distance_features",
    "lpf_solve",
    "normalize_cloud",
    "normalize_scores",
    "overlap",
    "parse_scores",
    "parse_xyz",
    "predict_scores",
    "preset_names",
    "random_drop",
    "rank_top_n",
    "second_diff_coords",
    "select_top_targets",
    "synthetic_score_oracle",
    "transition_apply",
    "variation_smoothness",
    "weighted_avg_coords",
    "write_coefficients",
    "write_scores",
    "write_xyz",
]
