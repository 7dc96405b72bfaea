"""The snapshot trust model: spatial propagation, temporal fusion and edge prediction."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import ParameterStore, Tensor
from ..base import ConfigError, IndexOutOfRangeError, SequenceError
from ..graph import Snapshot
from .predictor import PredictionResult, TrainConfig, init_predictor_params, predict_edge
from .spatial import (
    SnapshotEmbeddings,
    init_spatial_params,
    spatial_forward,
)
from .temporal import AttentionRecord, init_temporal_params, temporal_forward

logger = logging.getLogger(__name__)


@dataclass(kw_only=True)
class ModelOutput:
    final: Tensor
    snapshots: list[SnapshotEmbeddings]
    attention: AttentionRecord | None = None

    @property
    def observed(self) -> np.ndarray:
        """Nodes active in at least one snapshot of the sequence."""
        return np.logical_or.reduce([s.active for s in self.snapshots])


@dataclass(kw_only=True)
class TrustModel:
    """Parameters plus the wiring of one snapshot trust model instance.

    ``initial`` holds the node table h0; it lives in ``store`` as
    ``initial.embedding`` when trainable and is a constant tensor otherwise.
    """

    config: TrainConfig
    cardinality: int
    node_count: int
    snapshot_count: int
    store: ParameterStore
    initial: Tensor = field(repr=False)

    @classmethod
    def build(
        cls,
        config: TrainConfig,
        *,
        cardinality: int,
        node_count: int,
        snapshot_count: int,
        initial: np.ndarray | None = None,
    ) -> "TrustModel":
        if config.temporal.mode == "attention" and snapshot_count < 2:
            raise ConfigError(
                f"attention over snapshots needs >= 2 training snapshots, got {snapshot_count}"
            )
        if snapshot_count < 1:
            raise ConfigError("at least one training snapshot is required")
        store = ParameterStore(rng_seed=config.seed)
        shape = (node_count, config.spatial.initial_dim)
        if initial is not None and tuple(initial.shape) != shape:
            raise ConfigError(f"initial embeddings must have shape {shape}, got {initial.shape}")
        if config.train_initial_embeddings:
            table = (
                store.add("initial.embedding", initial)
                if initial is not None
                else store.glorot("initial.embedding", shape)
            )
        else:
            if initial is None:
                bound = np.sqrt(6.0 / sum(shape))
                initial = store.rng.uniform(-bound, bound, size=shape)
            table = Tensor(initial)
        init_spatial_params(store, config.spatial, cardinality)
        width = config.spatial.output_dim
        init_temporal_params(store, config.temporal, width, snapshot_count)
        init_predictor_params(store, width, cardinality, config.hidden_dim)
        logger.info(
            "model parameters=%d nodes=%d snapshots=%d mode=%s",
            len(store),
            node_count,
            snapshot_count,
            config.temporal.mode,
        )
        return cls(
            config=config,
            cardinality=cardinality,
            node_count=node_count,
            snapshot_count=snapshot_count,
            store=store,
            initial=table,
        )

    @classmethod
    def from_store(
        cls,
        config: TrainConfig,
        store: ParameterStore,
        *,
        cardinality: int,
        node_count: int,
        snapshot_count: int,
        initial: np.ndarray | None = None,
    ) -> "TrustModel":
        if "initial.embedding" in store:
            table = store["initial.embedding"]
        elif initial is not None:
            table = Tensor(initial)
        else:
            raise ConfigError("frozen initial embeddings must be supplied with the checkpoint")
        return cls(
            config=config,
            cardinality=cardinality,
            node_count=node_count,
            snapshot_count=snapshot_count,
            store=store,
            initial=table,
        )

    def forward(
        self,
        snapshots: list[Snapshot],
        *,
        rng: np.random.Generator | None = None,
        training: bool = False,
    ) -> ModelOutput:
        if len(snapshots) != self.snapshot_count:
            raise SequenceError(
                f"model was built for {self.snapshot_count} snapshots, got {len(snapshots)}"
            )
        rng = rng or np.random.default_rng(self.config.seed)
        outputs: list[SnapshotEmbeddings] = []
        carried = None
        for snapshot in snapshots:
            output = spatial_forward(
                snapshot,
                self.initial,
                self.config.spatial,
                self.store,
                carried=carried,
                rng=rng,
                training=training,
            )
            outputs.append(output)
            carried = output.embeddings
        final, scores = temporal_forward(
            [output.embeddings for output in outputs],
            self.store,
            self.config.temporal,
            rng=rng,
            training=training,
        )
        result = ModelOutput(final=final, snapshots=outputs)
        if scores is not None:
            result.attention = AttentionRecord(scores=scores, observed=result.observed)
        return result

    def predict(
        self, output: ModelOutput, sources: np.ndarray, targets: np.ndarray
    ) -> PredictionResult:
        sources = np.asarray(sources, dtype=np.int64)
        targets = np.asarray(targets, dtype=np.int64)
        for ids in (sources, targets):
            if ids.size and (ids.min() < 0 or ids.max() >= self.node_count):
                raise IndexOutOfRangeError(
                    f"edge endpoint outside the {self.node_count} embedded nodes"
                )
        return predict_edge(output.final[sources], output.final[targets], self.store)
