"""Edge trust-level classifier, its weighted objective and the training configuration."""

from dataclasses import dataclass, field

import numpy as np

from ..autodiff import ParameterStore, Tensor
from ..autodiff import tensor as ops
from ..base import ConfigError, DimensionError
from .spatial import SpatialConfig
from .temporal import TemporalConfig

PROBABILITY_FLOOR = 1e-12


@dataclass(kw_only=True, frozen=True)
class TrainConfig:
    learning_rate: float = 0.005
    max_epochs: int = 50
    patience: int | None = 10
    l2: float = 1e-5
    class_weights: tuple[float, ...] | None = None
    validation_fraction: float = 0.05
    seed: int = 0
    hidden_dim: int | None = None
    train_initial_embeddings: bool = True
    spatial: SpatialConfig = field(default_factory=SpatialConfig)
    temporal: TemporalConfig = field(default_factory=TemporalConfig)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise ConfigError(f"max epochs must be >= 1, got {self.max_epochs}")
        if self.patience is not None and self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if self.l2 < 0:
            raise ConfigError(f"L2 coefficient must be >= 0, got {self.l2}")
        if self.class_weights is not None and min(self.class_weights) <= 0:
            raise ConfigError(f"class weights must be > 0, got {self.class_weights}")
        if not 0 <= self.validation_fraction < 1:
            raise ConfigError(
                f"validation fraction must be in [0, 1), got {self.validation_fraction}"
            )
        if self.hidden_dim is not None and self.hidden_dim < 1:
            raise ConfigError(f"hidden dim must be positive, got {self.hidden_dim}")


def init_predictor_params(
    store: ParameterStore, width: int, cardinality: int, hidden_dim: int | None = None
):
    inputs = 2 * width
    if hidden_dim is not None:
        store.glorot("predictor.hidden.w", (hidden_dim, inputs))
        store.zeros("predictor.hidden.b", (hidden_dim,))
        inputs = hidden_dim
    store.glorot("predictor.w", (cardinality, inputs))
    store.zeros("predictor.b", (cardinality,))


@dataclass(kw_only=True)
class PredictionResult:
    """Per-edge probability vectors over trust levels, shaped ``(edges, levels)``."""

    probabilities: Tensor

    @property
    def scores(self) -> np.ndarray:
        return self.probabilities.values

    @property
    def predicted_level(self) -> np.ndarray:
        return self.scores.argmax(axis=-1)

    @property
    def margin(self) -> np.ndarray:
        """Difference between the two largest probabilities."""
        top = np.sort(self.scores, axis=-1)
        return top[..., -1] - top[..., -2]

    def __len__(self) -> int:
        return 1 if self.scores.ndim == 1 else self.scores.shape[0]


def predict_edge(h_u: Tensor, h_v: Tensor, params: ParameterStore) -> PredictionResult:
    """Trust-level distribution for ``u -> v`` from the trustor-first concatenation."""
    h_u, h_v = ops.as_tensor(h_u), ops.as_tensor(h_v)
    if h_u.shape != h_v.shape:
        raise DimensionError("predict_edge", h_u.shape, h_v.shape)
    features = ops.concat([h_u, h_v], axis=-1)
    if "predictor.hidden.w" in params:
        hidden_w = params["predictor.hidden.w"]
        if features.shape[-1] != hidden_w.shape[1]:
            raise DimensionError("predict_edge", features.shape, hidden_w.shape)
        features = ops.relu(
            features @ ops.swapaxes(hidden_w, 0, 1) + params["predictor.hidden.b"]
        )
    weight = params["predictor.w"]
    if features.shape[-1] != weight.shape[1]:
        raise DimensionError("predict_edge", features.shape, weight.shape)
    logits = features @ ops.swapaxes(weight, 0, 1) + params["predictor.b"]
    return PredictionResult(probabilities=ops.softmax(logits, axis=-1))


def inverse_frequency_weights(levels: np.ndarray, cardinality: int) -> np.ndarray:
    """Inverse class frequency, rescaled to mean 1 over all levels.

    Levels absent from ``levels`` take the largest weight of the present ones.
    """
    counts = np.bincount(levels, minlength=cardinality).astype(np.float64)
    if counts.sum() == 0:
        return np.ones(cardinality)
    present = counts > 0
    weights = np.zeros(cardinality)
    weights[present] = counts.sum() / counts[present]
    weights[~present] = weights[present].max()
    return weights / weights.mean()


def weighted_ce_loss(
    predictions: PredictionResult,
    truths: np.ndarray,
    *,
    class_weights: np.ndarray,
    l2: float,
    store: ParameterStore | None = None,
) -> Tensor:
    """Class-weighted negative log-likelihood summed over edges, plus ``l2 * ||theta||^2``."""
    probabilities = predictions.probabilities
    truths = np.asarray(truths, dtype=np.int64)
    if probabilities.ndim == 1:
        probabilities = ops.reshape(probabilities, (1, -1))
    if probabilities.shape[0] != truths.shape[0]:
        raise DimensionError("weighted_ce_loss", probabilities.shape, truths.shape)
    class_weights = np.asarray(class_weights, dtype=np.float64)
    picked = probabilities[np.arange(truths.shape[0]), truths]
    nll = ops.log(ops.clamp(picked, PROBABILITY_FLOOR, None))
    loss = ops.neg(ops.sum(nll * class_weights[truths]))
    if l2 > 0 and store is not None:
        loss = loss + ops.scale(store.l2(), l2)
    return loss
