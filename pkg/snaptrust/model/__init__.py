from .network import ModelOutput, TrustModel
from .predictor import (
    PredictionResult,
    TrainConfig,
    inverse_frequency_weights,
    predict_edge,
    weighted_ce_loss,
)
from .spatial import (
    CoefficientSlice,
    SnapshotEmbeddings,
    SpatialConfig,
    aggregate_role,
    build_message,
    embed_rating,
    fuse_roles,
    robust_coefficients,
    spatial_forward,
)
from .temporal import (
    AttentionRecord,
    TemporalConfig,
    add_positional,
    attention_scores,
    multi_head,
    temporal_fuse,
    variant_decay,
    variant_mean,
)

__all__ = [
    "AttentionRecord",
    "CoefficientSlice",
    "ModelOutput",
    "PredictionResult",
    "SnapshotEmbeddings",
    "SpatialConfig",
    "TemporalConfig",
    "TrainConfig",
    "TrustModel",
    "add_positional",
    "aggregate_role",
    "attention_scores",
    "build_message",
    "embed_rating",
    "fuse_roles",
    "inverse_frequency_weights",
    "multi_head",
    "predict_edge",
    "robust_coefficients",
    "spatial_forward",
    "temporal_fuse",
    "variant_decay",
    "variant_mean",
    "weighted_ce_loss",
]
