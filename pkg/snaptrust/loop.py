"""
Full-batch training loop for the snapshot trust model.
"""

import json
import logging
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

from .autodiff import AdamState, adam_step, backward
from .base import ConfigError, DivergenceError
from .graph import Snapshot
from .model import ModelOutput, TrainConfig, TrustModel, inverse_frequency_weights, weighted_ce_loss
from .model.spatial import coefficient_records

logger = logging.getLogger(__name__)


@dataclass(kw_only=True, frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    validation_loss: float | None = None
    events: tuple[str, ...] = ()


@dataclass(kw_only=True, frozen=True)
class EdgeSplit:
    """Training edges of the snapshot union, split into fitting and validation parts."""

    sources: np.ndarray
    targets: np.ndarray
    levels: np.ndarray
    validation: np.ndarray

    @property
    def fit(self) -> np.ndarray:
        return ~self.validation


@dataclass(kw_only=True)
class TrainOutcome:
    model: TrustModel
    history: list[EpochRecord]
    best_epoch: int
    output: ModelOutput
    split: EdgeSplit
    coefficients: pd.DataFrame = field(repr=False)

    @property
    def loss_curve(self) -> list[float]:
        return [record.train_loss for record in self.history]

    def training_accuracy(self) -> float:
        predictions = self.model.predict(self.output, self.split.sources, self.split.targets)
        return float((predictions.predicted_level == self.split.levels).mean())


def split_training_edges(
    snapshots: list[Snapshot], fraction: float, rng: np.random.Generator
) -> EdgeSplit:
    """Hold out ``fraction`` of each level's edges for validation."""
    sources = np.concatenate([s.sources for s in snapshots])
    targets = np.concatenate([s.targets for s in snapshots])
    levels = np.concatenate([s.levels for s in snapshots])
    validation = np.zeros(levels.shape, dtype=bool)
    for level in np.unique(levels):
        members = np.flatnonzero(levels == level)
        held = int(round(fraction * members.size))
        if held and held < members.size:
            validation[rng.permutation(members)[:held]] = True
    return EdgeSplit(sources=sources, targets=targets, levels=levels, validation=validation)


def _append_log(path: Path | None, record: EpochRecord):
    if path is None:
        return
    with path.open("a") as handle:
        handle.write(json.dumps(asdict(record)) + "\n")


def train(
    *,
    train_snapshots: list[Snapshot],
    config: TrainConfig,
    cardinality: int,
    node_count: int | None = None,
    initial: np.ndarray | None = None,
    epoch_callback: Callable[[EpochRecord], None] | None = None,
    metrics_log: str | Path | None = None,
    progress: bool = False,
) -> TrainOutcome:
    """
    Fit the model on the union of ``train_snapshots`` and return the best parameters.
    """
    if config.temporal.mode == "attention" and len(train_snapshots) < 2:
        raise ConfigError(
            f"training needs >= 2 snapshots for temporal attention, got {len(train_snapshots)}"
        )
    if not train_snapshots:
        raise ConfigError("training needs at least one snapshot")
    node_count = max([node_count or 0] + [s.node_count for s in train_snapshots])
    snapshots = [s.resized(node_count) for s in train_snapshots]

    rng = np.random.default_rng(config.seed)
    split = split_training_edges(snapshots, config.validation_fraction, rng)
    if not split.levels.size:
        raise ConfigError("training snapshots contain no edges")
    weights = (
        np.asarray(config.class_weights, dtype=np.float64)
        if config.class_weights is not None
        else inverse_frequency_weights(split.levels[split.fit], cardinality)
    )
    if weights.shape != (cardinality,):
        raise ConfigError(f"{weights.size} class weights given for {cardinality} trust levels")

    model = TrustModel.build(
        config,
        cardinality=cardinality,
        node_count=node_count,
        snapshot_count=len(snapshots),
        initial=initial,
    )
    store = model.store
    state = AdamState(learning_rate=config.learning_rate)
    log_path = Path(metrics_log) if metrics_log is not None else None
    if log_path is not None:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        log_path.write_text("")

    has_validation = bool(split.validation.any())
    fit = split.fit
    history: list[EpochRecord] = []
    best_loss, best_epoch, best_values = np.inf, 0, store.values()
    stale = 0

    epochs = tqdm(range(1, config.max_epochs + 1), desc="train", unit="epoch", disable=not progress)
    for epoch in epochs:
        store.zero_grad()
        output = model.forward(snapshots, rng=rng, training=True)
        predictions = model.predict(output, split.sources[fit], split.targets[fit])
        loss = weighted_ce_loss(
            predictions, split.levels[fit], class_weights=weights, l2=config.l2, store=store
        )
        train_loss = loss.item()
        if not np.isfinite(train_loss):
            raise DivergenceError(epoch, train_loss)
        backward(loss)
        adam_step(store, state)

        events: list[str] = []
        validation_loss = None
        if has_validation:
            held = model.forward(snapshots, training=False)
            validation_loss = weighted_ce_loss(
                model.predict(held, split.sources[split.validation], split.targets[split.validation]),
                split.levels[split.validation],
                class_weights=weights,
                l2=0.0,
            ).item()
            if validation_loss < best_loss:
                best_loss, best_epoch, best_values = validation_loss, epoch, store.values()
                stale = 0
                events.append("improved")
            else:
                stale += 1
        else:
            best_epoch, best_values = epoch, None

        stop = config.patience is not None and has_validation and stale >= config.patience
        if stop:
            events.append("early_stop")
        record = EpochRecord(
            epoch=epoch,
            train_loss=train_loss,
            validation_loss=validation_loss,
            events=tuple(events),
        )
        history.append(record)
        _append_log(log_path, record)
        if epoch_callback is not None:
            epoch_callback(record)
        epochs.set_postfix(loss=f"{train_loss:.4f}")
        logger.debug(
            "epoch=%d train_loss=%.6f validation_loss=%s", epoch, train_loss, validation_loss
        )

        if stop:
            logger.info("early_stop epoch=%d best_epoch=%d", epoch, best_epoch)
            break

    if best_values is not None:
        store.load_values(best_values)
    output = model.forward(snapshots, training=False)
    coefficients = pd.concat(
        [coefficient_records(piece, snapshot) for piece, snapshot in zip(output.snapshots, snapshots)],
        ignore_index=True,
    )
    logger.info(
        "trained epochs=%d best_epoch=%d final_train_loss=%.6f",
        len(history),
        best_epoch,
        history[-1].train_loss,
    )
    return TrainOutcome(
        model=model,
        history=history,
        best_epoch=best_epoch,
        output=output,
        split=split,
        coefficients=coefficients,
    )
