"""Per-snapshot trust propagation with similarity-pruned, dual-role aggregation.

Each layer embeds edge ratings, builds ``neighbor ++ rating`` messages, weighs
them by robust coefficients and fuses the trustee-side and trustor-side
aggregates into the next node embedding. All edges of one role are processed
at once: rows are gathered with ``take`` and scattered back per centre node with
``segment_sum``.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..autodiff import ParameterStore, Tensor
from ..autodiff import tensor as ops
from ..base import AlignmentError, ConfigError, DimensionError, IndexOutOfRangeError
from ..graph import Role, Snapshot

logger = logging.getLogger(__name__)

DEFAULT_INITIAL_DIM = 64
EDGE_DIM = 32
INNER_DIM = 64


def default_layer_dims(layer_count: int) -> tuple[int, ...]:
    """32 for the outer layers and 64 in between, e.g. ``(32, 64, 32)`` for three layers."""
    if layer_count == 1:
        return (EDGE_DIM,)
    return (EDGE_DIM,) + (INNER_DIM,) * (layer_count - 2) + (EDGE_DIM,)


@dataclass(kw_only=True, frozen=True)
class SpatialConfig:
    layer_count: int = 3
    layer_dims: tuple[int, ...] | None = None
    initial_dim: int = DEFAULT_INITIAL_DIM
    prune_threshold: float = 0.5
    defense_enabled: bool = True
    structural_dropout: float = 0.0
    use_trustee: bool = True
    use_trustor: bool = True

    def __post_init__(self):
        if self.layer_count < 1:
            raise ConfigError(f"layer count must be >= 1, got {self.layer_count}")
        if self.layer_dims is not None:
            if len(self.layer_dims) != self.layer_count:
                raise ConfigError(
                    f"{len(self.layer_dims)} layer dims given for {self.layer_count} layers"
                )
            if min(self.layer_dims) < 1:
                raise ConfigError(f"layer dims must be positive, got {self.layer_dims}")
        if self.initial_dim < 1:
            raise ConfigError(f"initial dim must be positive, got {self.initial_dim}")
        if not 0 <= self.prune_threshold < 1:
            raise ConfigError(f"prune threshold must be in [0, 1), got {self.prune_threshold}")
        if not 0 <= self.structural_dropout < 1:
            raise ConfigError(f"structural dropout must be in [0, 1), got {self.structural_dropout}")
        if not (self.use_trustee or self.use_trustor):
            raise ConfigError("at least one of the trustee and trustor branches must be enabled")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layer_dims or default_layer_dims(self.layer_count)

    @property
    def output_dim(self) -> int:
        return self.dims[-1]

    def input_dim(self, layer: int) -> int:
        """Embedding width entering ``layer`` (1-based)."""
        return self.initial_dim if layer == 1 else self.dims[layer - 2]


def init_spatial_params(store: ParameterStore, config: SpatialConfig, cardinality: int):
    for layer in range(1, config.layer_count + 1):
        d_in, d_out = config.input_dim(layer), config.dims[layer - 1]
        store.glorot(f"spatial.{layer}.w_te", (d_in, cardinality))
        store.glorot(f"spatial.{layer}.w_tr", (d_in, cardinality))
        store.glorot(f"spatial.{layer}.w_both", (d_out, 4 * d_in))
        store.zeros(f"spatial.{layer}.b_both", (d_out,))
    store.glorot("spatial.carry", (config.output_dim, config.initial_dim))


def _rating_weight(params: ParameterStore, layer: int, role: Role) -> Tensor:
    suffix = "w_te" if role is Role.TRUSTEE else "w_tr"
    return params[f"spatial.{layer}.{suffix}"]


def embed_rating(level: int, layer: int, role: Role, params: ParameterStore) -> Tensor:
    """Project the one-hot trust level through the role's rating matrix."""
    weight = _rating_weight(params, layer, Role(role))
    cardinality = weight.shape[1]
    if not 0 <= level < cardinality:
        raise IndexOutOfRangeError(f"trust level {level} outside [0, {cardinality})")
    return weight @ np.eye(cardinality)[level]


def embed_ratings(levels: np.ndarray, layer: int, role: Role, params: ParameterStore) -> Tensor:
    weight = _rating_weight(params, layer, Role(role))
    cardinality = weight.shape[1]
    if levels.size and (levels.min() < 0 or levels.max() >= cardinality):
        raise IndexOutOfRangeError(f"trust levels outside [0, {cardinality})")
    return Tensor(np.eye(cardinality)[levels]) @ ops.swapaxes(weight, 0, 1)


def build_message(h_neighbor: Tensor, omega: Tensor) -> Tensor:
    """Concatenate neighbor embedding and rating embedding along the last axis."""
    h_neighbor, omega = ops.as_tensor(h_neighbor), ops.as_tensor(omega)
    if h_neighbor.shape != omega.shape:
        raise DimensionError("build_message", h_neighbor.shape, omega.shape)
    return ops.concat([h_neighbor, omega], axis=-1)


def role_edges(snapshot: Snapshot, role: Role) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(centers, neighbors, edge positions)`` for one role, self-loops excluded.

    A node's trustee-role neighbors are the sources of its in-edges; its
    trustor-role neighbors are the targets of its out-edges.
    """
    positions = np.flatnonzero(snapshot.sources != snapshot.targets)
    if Role(role) is Role.TRUSTEE:
        return snapshot.targets[positions], snapshot.sources[positions], positions
    return snapshot.sources[positions], snapshot.targets[positions], positions


@dataclass(kw_only=True)
class CoefficientSlice:
    """Robust coefficients of every edge in one (layer, role) of a snapshot."""

    snapshot: int
    layer: int
    role: Role
    centers: np.ndarray
    neighbors: np.ndarray
    positions: np.ndarray
    values: Tensor
    pruned: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def __len__(self) -> int:
        return len(self.centers)

    def row(self, node: int) -> dict[int, float]:
        """Coefficients of ``node``'s neighbors, keyed by neighbor id (parallel edges summed)."""
        row: dict[int, float] = {}
        for neighbor, value in zip(
            self.neighbors[self.centers == node].tolist(),
            self.values.values[self.centers == node].tolist(),
        ):
            row[neighbor] = row.get(neighbor, 0.0) + value
        return row


def _group_total(values: Tensor, centers: np.ndarray, node_count: int) -> Tensor:
    return ops.take(ops.segment_sum(values, centers, node_count), centers)


def robust_coefficients(
    prev_embeddings: Tensor,
    snapshot: Snapshot,
    role: Role,
    thr: float,
    *,
    defense_enabled: bool = True,
    layer: int = 1,
) -> CoefficientSlice:
    """Similarity-normalised, pruned and renormalised aggregation weights for one role.

    With the defense disabled every neighbor of a node gets ``1 / degree``.
    """
    role = Role(role)
    prev_embeddings = ops.as_tensor(prev_embeddings)
    node_count = prev_embeddings.shape[0]
    if snapshot.node_count > node_count:
        raise DimensionError(
            "robust_coefficients", prev_embeddings.shape, (snapshot.node_count,)
        )
    centers, neighbors, positions = role_edges(snapshot, role)
    degree = np.bincount(centers, minlength=node_count).astype(np.float64)
    uniform = 1.0 / degree[centers] if centers.size else np.zeros(0)

    def make(values: Tensor, pruned: np.ndarray) -> CoefficientSlice:
        return CoefficientSlice(
            snapshot=snapshot.index,
            layer=layer,
            role=role,
            centers=centers,
            neighbors=neighbors,
            positions=positions,
            values=values,
            pruned=pruned,
        )

    if not defense_enabled or centers.size == 0:
        return make(Tensor(uniform), np.zeros(centers.size, dtype=bool))

    similarity = ops.clamp(
        ops.cosine(ops.take(prev_embeddings, centers), ops.take(prev_embeddings, neighbors)),
        0.0,
        1.0,
    )
    total = _group_total(similarity, centers, node_count)
    empty = total.values <= 0
    normalized = ops.where(empty, uniform, similarity / ops.where(empty, 1.0, total))

    keep = normalized.values >= thr
    survivors = np.bincount(centers, weights=keep.astype(np.float64), minlength=node_count)
    # Groups where every neighbor falls below thr fall back to the normalized weights.
    keep |= survivors[centers] == 0
    kept = normalized * keep.astype(np.float64)
    kept_total = _group_total(kept, centers, node_count)
    values = kept / ops.where(kept_total.values > 0, kept_total, 1.0)
    return make(values, ~keep)


def aggregate_role(
    messages: Tensor | Sequence[Tensor],
    coefficients: Tensor | Sequence[float],
    *,
    centers: np.ndarray | None = None,
    node_count: int | None = None,
    message_dim: int | None = None,
) -> Tensor:
    """Coefficient-weighted sum of messages.

    Without ``centers`` the messages belong to one node and a single vector is
    returned; with ``centers`` the sums are scattered into ``node_count`` rows.
    An empty message set yields zeros of ``message_dim``.
    """
    if not isinstance(messages, Tensor):
        messages = list(messages)
        if not messages:
            if message_dim is None:
                raise DimensionError("aggregate_role", (0,), ())
            width = (node_count, message_dim) if centers is not None else (message_dim,)
            if len(coefficients):
                raise AlignmentError(f"0 messages but {len(coefficients)} coefficients")
            return Tensor(np.zeros(width))
        messages = ops.concat([ops.reshape(m, (1, -1)) for m in messages], axis=0)
    coefficients = ops.as_tensor(coefficients)
    if coefficients.ndim != 1 or coefficients.shape[0] != messages.shape[0]:
        raise AlignmentError(
            f"{messages.shape[0]} messages but coefficients of shape {coefficients.shape}"
        )
    weighted = messages * ops.reshape(coefficients, (-1, 1))
    if centers is None:
        return ops.sum(weighted, axis=0)
    return ops.segment_sum(weighted, centers, node_count)


def fuse_roles(h_te: Tensor, h_tr: Tensor, layer: int, params: ParameterStore) -> Tensor:
    """ReLU(W_both (h_te ++ h_tr) + b_both); accepts single vectors or row batches."""
    weight = params[f"spatial.{layer}.w_both"]
    bias = params[f"spatial.{layer}.b_both"]
    h_te, h_tr = ops.as_tensor(h_te), ops.as_tensor(h_tr)
    if h_te.shape != h_tr.shape or 2 * h_te.shape[-1] != weight.shape[1]:
        raise DimensionError("fuse_roles", h_te.shape, h_tr.shape, weight.shape)
    joint = ops.concat([h_te, h_tr], axis=-1)
    return ops.relu(joint @ ops.swapaxes(weight, 0, 1) + bias)


@dataclass(kw_only=True)
class SnapshotEmbeddings:
    """Node embeddings of one snapshot plus the coefficients that produced them."""

    snapshot: int
    embeddings: Tensor
    active: np.ndarray
    coefficients: list[CoefficientSlice]


COEFFICIENT_COLUMNS = (
    "snapshot",
    "layer",
    "role",
    "source",
    "target",
    "coefficient",
    "pruned",
    "malicious",
)


def coefficient_records(output: SnapshotEmbeddings, snapshot: Snapshot) -> pd.DataFrame:
    """One row per (layer, role, edge) with the coefficient the edge received."""
    frames = [
        pd.DataFrame(
            {
                "snapshot": snapshot.index,
                "layer": piece.layer,
                "role": str(piece.role),
                "source": snapshot.sources[piece.positions],
                "target": snapshot.targets[piece.positions],
                "coefficient": piece.values.values,
                "pruned": piece.pruned if piece.pruned.size else False,
                "malicious": snapshot.malicious_mask[piece.positions],
            }
        )
        for piece in output.coefficients
        if len(piece)
    ]
    if not frames:
        return pd.DataFrame(columns=list(COEFFICIENT_COLUMNS))
    return pd.concat(frames, ignore_index=True)


def carry_projection(initial: Tensor, params: ParameterStore) -> Tensor:
    return ops.as_tensor(initial) @ ops.swapaxes(params["spatial.carry"], 0, 1)


def spatial_forward(
    snapshot: Snapshot,
    initial: Tensor,
    config: SpatialConfig,
    params: ParameterStore,
    *,
    carried: Tensor | None = None,
    rng: np.random.Generator | None = None,
    training: bool = False,
) -> SnapshotEmbeddings:
    """Run every propagation layer over one snapshot.

    Nodes without an incident edge keep ``carried`` (the previous snapshot's
    output) or, for the first snapshot, the projection of their initial row.
    """
    initial = ops.as_tensor(initial)
    if initial.ndim != 2 or initial.shape[1] != config.initial_dim:
        raise DimensionError("spatial_forward", initial.shape, (config.initial_dim,))
    node_count = initial.shape[0]
    if snapshot.node_count > node_count:
        raise IndexOutOfRangeError(
            f"snapshot {snapshot.index} has {snapshot.node_count} nodes, embeddings cover {node_count}"
        )
    active = snapshot.resized(node_count).active_mask
    rng = rng or np.random.default_rng(0)

    hidden = initial
    slices: list[CoefficientSlice] = []
    for layer in range(1, config.layer_count + 1):
        width = 2 * config.input_dim(layer)
        branches: dict[Role, Tensor] = {}
        for role, enabled in ((Role.TRUSTEE, config.use_trustee), (Role.TRUSTOR, config.use_trustor)):
            if not enabled:
                branches[role] = Tensor(np.zeros((node_count, width)))
                continue
            coefficients = robust_coefficients(
                hidden,
                snapshot,
                role,
                config.prune_threshold,
                defense_enabled=config.defense_enabled,
                layer=layer,
            )
            slices.append(coefficients)
            omega = embed_ratings(snapshot.levels[coefficients.positions], layer, role, params)
            messages = build_message(ops.take(hidden, coefficients.neighbors), omega)
            messages = ops.dropout(messages, config.structural_dropout, rng, training)
            branches[role] = aggregate_role(
                messages,
                coefficients.values,
                centers=coefficients.centers,
                node_count=node_count,
            )
        hidden = fuse_roles(branches[Role.TRUSTEE], branches[Role.TRUSTOR], layer, params)

    fallback = carried if carried is not None else carry_projection(initial, params)
    embeddings = ops.where(active[:, None], hidden, fallback)
    logger.debug(
        "snapshot=%d active_nodes=%d edges=%d", snapshot.index, int(active.sum()), len(snapshot.edges)
    )
    return SnapshotEmbeddings(
        snapshot=snapshot.index, embeddings=embeddings, active=active, coefficients=slices
    )
