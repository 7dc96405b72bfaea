"""Fusing per-snapshot node embeddings into one final embedding per node.

Sequences are batched as ``(nodes, timeslots, width)``; the same functions also
accept a single node's ``(timeslots, width)`` sequence.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import pandas as pd

from ..autodiff import ParameterStore, Tensor
from ..autodiff import tensor as ops
from ..base import ConfigError, SequenceError

TemporalMode = Literal["attention", "mean", "decay"]
TEMPORAL_MODES: tuple[TemporalMode, ...] = ("attention", "mean", "decay")


@dataclass(kw_only=True, frozen=True)
class TemporalConfig:
    mode: TemporalMode = "attention"
    heads: int = 8
    dropout: float = 0.5
    decay_scale: float = 1.0

    def __post_init__(self):
        if self.mode not in TEMPORAL_MODES:
            raise ConfigError(f"temporal mode must be one of {TEMPORAL_MODES}, got {self.mode}")
        if self.heads < 1:
            raise ConfigError(f"head count must be >= 1, got {self.heads}")
        if not 0 <= self.dropout < 1:
            raise ConfigError(f"temporal dropout must be in [0, 1), got {self.dropout}")
        if self.decay_scale <= 0:
            raise ConfigError(f"decay scale must be > 0, got {self.decay_scale}")

    def head_dim(self, width: int) -> int:
        if width % self.heads:
            raise ConfigError(f"{self.heads} heads do not divide embedding width {width}")
        return width // self.heads


@dataclass(kw_only=True, frozen=True)
class HeadParams:
    w_q: Tensor
    w_k: Tensor
    w_v: Tensor


def init_temporal_params(
    store: ParameterStore, config: TemporalConfig, width: int, snapshot_count: int
):
    if config.mode != "attention":
        return
    head_dim = config.head_dim(width)
    store.glorot("temporal.position", (snapshot_count, width))
    for head in range(config.heads):
        for name in ("w_q", "w_k", "w_v"):
            store.glorot(f"temporal.{head}.{name}", (head_dim, width))


def head_params(store: ParameterStore, head: int) -> HeadParams:
    return HeadParams(
        w_q=store[f"temporal.{head}.w_q"],
        w_k=store[f"temporal.{head}.w_k"],
        w_v=store[f"temporal.{head}.w_v"],
    )


def stack_sequence(per_snapshot: list[Tensor]) -> Tensor:
    """Stack ``n`` matrices of shape ``(nodes, width)`` into ``(nodes, n, width)``."""
    if not per_snapshot:
        raise SequenceError("cannot stack an empty snapshot sequence")
    return ops.concat([ops.reshape(h, (h.shape[0], 1, h.shape[1])) for h in per_snapshot], axis=1)


def _check_sequence(sequence: Tensor):
    if sequence.ndim < 2 or sequence.shape[-2] == 0:
        raise SequenceError(f"expected a nonempty sequence, got shape {sequence.shape}")


def add_positional(sequence: Tensor, params: ParameterStore) -> Tensor:
    position = params["temporal.position"]
    sequence = ops.as_tensor(sequence)
    _check_sequence(sequence)
    if sequence.shape[-2] != position.shape[0] or sequence.shape[-1] != position.shape[1]:
        raise SequenceError(
            f"sequence of shape {sequence.shape} does not match positional table {position.shape}"
        )
    return sequence + position


def _project(sequence: Tensor, weight: Tensor) -> Tensor:
    return sequence @ ops.swapaxes(weight, 0, 1)


def attention_scores(sequence: Tensor, head: HeadParams) -> Tensor:
    """Softmax over timeslots of the last timeslot's query against every key."""
    sequence = ops.as_tensor(sequence)
    _check_sequence(sequence)
    head_dim = head.w_q.shape[0]
    query = _project(sequence[..., -1, :], head.w_q)
    keys = _project(sequence, head.w_k)
    query = ops.reshape(query, (*query.shape[:-1], 1, head_dim))
    logits = ops.scale(ops.sum(keys * query, axis=-1), 1.0 / math.sqrt(head_dim))
    return ops.softmax(logits, axis=-1)


def temporal_fuse(sequence: Tensor, alpha: Tensor, head: HeadParams) -> Tensor:
    sequence = ops.as_tensor(sequence)
    values = _project(sequence, head.w_v)
    weights = ops.reshape(alpha, (*alpha.shape, 1))
    return ops.sum(values * weights, axis=-2)


def multi_head(
    sequence: Tensor,
    params: ParameterStore,
    config: TemporalConfig,
    *,
    rng: np.random.Generator | None = None,
    training: bool = False,
) -> tuple[Tensor, np.ndarray]:
    """Concatenate every head's fused vector; also return the ``(..., heads, n)`` scores."""
    sequence = ops.as_tensor(sequence)
    config.head_dim(sequence.shape[-1])
    rng = rng or np.random.default_rng(0)
    encoded = add_positional(sequence, params)
    outputs, scores = [], []
    for head in range(config.heads):
        weights = head_params(params, head)
        alpha = attention_scores(encoded, weights)
        fused = temporal_fuse(encoded, alpha, weights)
        outputs.append(ops.dropout(fused, config.dropout, rng, training))
        scores.append(alpha.values)
    return ops.concat(outputs, axis=-1), np.stack(scores, axis=-2)


def variant_mean(sequence: Tensor) -> Tensor:
    sequence = ops.as_tensor(sequence)
    _check_sequence(sequence)
    return ops.mean(sequence, axis=-2)


def decay_weights(length: int, decay_scale: float) -> np.ndarray:
    """Weights proportional to ``exp((i - n) / tau)`` for timeslots ``i = 1..n``."""
    if decay_scale <= 0:
        raise ConfigError(f"decay scale must be > 0, got {decay_scale}")
    if length < 1:
        raise SequenceError("decay weights need at least one timeslot")
    raw = np.exp((np.arange(1, length + 1) - length) / decay_scale)
    return raw / raw.sum()


def variant_decay(sequence: Tensor, decay_scale: float) -> Tensor:
    sequence = ops.as_tensor(sequence)
    _check_sequence(sequence)
    weights = decay_weights(sequence.shape[-2], decay_scale)
    return ops.sum(sequence * weights[:, None], axis=-2)


@dataclass(kw_only=True)
class AttentionRecord:
    """Attention over timeslots per node and head, shaped ``(nodes, heads, n)``."""

    scores: np.ndarray
    observed: np.ndarray | None = None

    @property
    def timeslots(self) -> int:
        return self.scores.shape[-1]

    def trend(self) -> np.ndarray:
        """Mean score per timeslot over heads and observed nodes."""
        rows = self.scores if self.observed is None else self.scores[self.observed]
        if rows.shape[0] == 0:
            return np.full(self.timeslots, 1.0 / self.timeslots)
        return rows.mean(axis=(0, 1))

    def records(self) -> pd.DataFrame:
        nodes, heads, slots = self.scores.shape
        node, head, slot = np.meshgrid(
            np.arange(nodes), np.arange(heads), np.arange(slots), indexing="ij"
        )
        frame = pd.DataFrame(
            {
                "node": node.ravel(),
                "head": head.ravel(),
                "timeslot": slot.ravel(),
                "score": self.scores.ravel(),
            }
        )
        if self.observed is not None:
            frame = frame[self.observed[frame["node"].to_numpy()]]
        return frame.reset_index(drop=True)


def temporal_forward(
    per_snapshot: list[Tensor],
    params: ParameterStore,
    config: TemporalConfig,
    *,
    rng: np.random.Generator | None = None,
    training: bool = False,
) -> tuple[Tensor, np.ndarray | None]:
    """Final embeddings for every node plus attention scores in attention mode."""
    sequence = stack_sequence(per_snapshot)
    if config.mode == "mean":
        return variant_mean(sequence), None
    if config.mode == "decay":
        return variant_decay(sequence, config.decay_scale), None
    return multi_head(sequence, params, config, rng=rng, training=training)
