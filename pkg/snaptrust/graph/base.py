"""Data model for timestamped, level-labelled trust graphs."""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from .._compat import StrEnum
from functools import cached_property

import numpy as np

from ..base import ConfigError, IndexOutOfRangeError, MappingError


@dataclass(kw_only=True, frozen=True)
class RatingBin:
    """Closed interval of raw ratings mapped onto one trust level."""

    low: float
    high: float
    level: int

    def __contains__(self, rating: float) -> bool:
        return self.low <= rating <= self.high


@dataclass(kw_only=True, frozen=True)
class TrustLevelScheme:
    """Ordered trust levels (least to most trust) and the raw-rating mapping."""

    name: str
    level_names: tuple[str, ...]
    bins: tuple[RatingBin, ...]
    positive_levels: frozenset[int] | None = None
    negative_levels: frozenset[int] | None = None

    def __post_init__(self):
        if len(self.level_names) < 2:
            raise ConfigError(
                f"scheme {self.name} needs at least 2 trust levels, got {len(self.level_names)}"
            )
        for rating_bin in self.bins:
            if not 0 <= rating_bin.level < len(self.level_names):
                raise ConfigError(
                    f"scheme {self.name} maps onto level {rating_bin.level} outside [0, {len(self.level_names)})"
                )

    @property
    def cardinality(self) -> int:
        return len(self.level_names)

    @property
    def max_trust_level(self) -> int:
        return self.cardinality - 1

    @property
    def min_trust_level(self) -> int:
        return 0

    @property
    def has_polarity(self) -> bool:
        return self.positive_levels is not None and self.negative_levels is not None

    def map_rating(self, rating: float) -> int:
        """Return the level index of a raw rating; raise MappingError if uncovered."""
        for rating_bin in self.bins:
            if rating in rating_bin:
                return rating_bin.level
        raise MappingError(f"rating {rating} is outside the {self.name} scheme")

    def map_ratings(self, ratings: np.ndarray) -> np.ndarray:
        levels = np.full(ratings.shape, -1, dtype=np.int64)
        for rating_bin in self.bins:
            inside = (ratings >= rating_bin.low) & (ratings <= rating_bin.high)
            levels[inside & (levels < 0)] = rating_bin.level
        return levels

    def check_level(self, level: int) -> int:
        if not 0 <= level < self.cardinality:
            raise IndexOutOfRangeError(
                f"trust level {level} outside [0, {self.cardinality}) for scheme {self.name}"
            )
        return level


BITCOIN_SCHEME = TrustLevelScheme(
    name="bitcoin",
    level_names=("Distrust", "Trust"),
    bins=(
        RatingBin(low=-10, high=-1, level=0),
        RatingBin(low=1, high=10, level=1),
    ),
    positive_levels=frozenset({1}),
    negative_levels=frozenset({0}),
)

# Four-level certification scheme; no Good/Bad polarity is defined for it.
ADVOGATO_SCHEME = TrustLevelScheme(
    name="advogato",
    level_names=("Observer", "Apprentice", "Journeyer", "Master"),
    bins=(
        RatingBin(low=0.35, high=0.45, level=0),
        RatingBin(low=0.55, high=0.65, level=1),
        RatingBin(low=0.75, high=0.85, level=2),
        RatingBin(low=0.95, high=1.05, level=3),
    ),
)

SCHEMES: dict[str, TrustLevelScheme] = {
    scheme.name: scheme for scheme in (BITCOIN_SCHEME, ADVOGATO_SCHEME)
}


@dataclass(kw_only=True, frozen=True)
class TrustEdge:
    """``source`` (trustor) rates ``target`` (trustee) with ``level`` at ``timestamp``."""

    source: int
    target: int
    level: int
    timestamp: float
    injected: bool = False
    malicious: bool = False

    def __post_init__(self):
        if not math.isfinite(self.timestamp):
            raise ConfigError(f"edge {self.source}->{self.target} has a non-finite timestamp")

    @property
    def is_self_loop(self) -> bool:
        return self.source == self.target


class Role(StrEnum):
    TRUSTEE = "trustee"
    TRUSTOR = "trustor"


def _edge_arrays(edges: Sequence[TrustEdge]) -> dict[str, np.ndarray]:
    return {
        "sources": np.fromiter((e.source for e in edges), dtype=np.int64, count=len(edges)),
        "targets": np.fromiter((e.target for e in edges), dtype=np.int64, count=len(edges)),
        "levels": np.fromiter((e.level for e in edges), dtype=np.int64, count=len(edges)),
        "timestamps": np.fromiter((e.timestamp for e in edges), dtype=np.float64, count=len(edges)),
    }


@dataclass(kw_only=True, frozen=True)
class Snapshot:
    """All trust edges that fall inside one time window."""

    index: int
    start: float
    end: float
    edges: tuple[TrustEdge, ...]
    node_count: int
    closed_right: bool = False

    @cached_property
    def _arrays(self) -> dict[str, np.ndarray]:
        return _edge_arrays(self.edges)

    @property
    def sources(self) -> np.ndarray:
        return self._arrays["sources"]

    @property
    def targets(self) -> np.ndarray:
        return self._arrays["targets"]

    @property
    def levels(self) -> np.ndarray:
        return self._arrays["levels"]

    @property
    def timestamps(self) -> np.ndarray:
        return self._arrays["timestamps"]

    @cached_property
    def malicious_mask(self) -> np.ndarray:
        return np.fromiter((e.malicious for e in self.edges), dtype=bool, count=len(self.edges))

    @cached_property
    def injected_mask(self) -> np.ndarray:
        return np.fromiter((e.injected for e in self.edges), dtype=bool, count=len(self.edges))

    @cached_property
    def nodes(self) -> frozenset[int]:
        return frozenset(self.sources.tolist()) | frozenset(self.targets.tolist())

    @cached_property
    def active_mask(self) -> np.ndarray:
        """Nodes incident to at least one non-self-loop edge."""
        mask = np.zeros(self.node_count, dtype=bool)
        proper = self.sources != self.targets
        mask[self.sources[proper]] = True
        mask[self.targets[proper]] = True
        return mask

    @cached_property
    def _adjacency(self) -> tuple[dict[int, list[int]], dict[int, list[int]]]:
        trustor: dict[int, list[int]] = {}
        trustee: dict[int, list[int]] = {}
        for edge in self.edges:
            if edge.is_self_loop:
                continue
            trustor.setdefault(edge.source, []).append(edge.target)
            trustee.setdefault(edge.target, []).append(edge.source)
        return trustor, trustee

    def neighbor_sets(self, node: int) -> tuple[list[int], list[int]]:
        """Return ``(trustor-role neighbors, trustee-role neighbors)`` of ``node``.

        Trustor-role neighbors are the targets of the node's out-edges, trustee-role
        neighbors the sources of its in-edges. Parallel edges appear once per edge.
        """
        trustor, trustee = self._adjacency
        return list(trustor.get(node, [])), list(trustee.get(node, []))

    def in_window(self, timestamp: float) -> bool:
        if self.closed_right:
            return self.start <= timestamp <= self.end
        return self.start <= timestamp < self.end

    def with_edges(self, extra: Iterable[TrustEdge], node_count: int | None = None) -> "Snapshot":
        """Return a copy of this snapshot with ``extra`` edges appended."""
        return replace(
            self,
            edges=self.edges + tuple(extra),
            node_count=max(node_count or 0, self.node_count),
        )

    def resized(self, node_count: int) -> "Snapshot":
        return replace(self, node_count=max(node_count, self.node_count))

    def level_counts(self, cardinality: int) -> list[int]:
        return np.bincount(self.levels, minlength=cardinality).tolist()


@dataclass(kw_only=True, frozen=True)
class DynamicGraph:
    """Time-sorted trust edges over dense node ids ``[0, node_count)``."""

    scheme: TrustLevelScheme
    edges: tuple[TrustEdge, ...]
    node_count: int
    original_ids: tuple[int, ...] = field(default=(), repr=False)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def time_span(self) -> tuple[float, float]:
        if not self.edges:
            return (0.0, 0.0)
        return (self.edges[0].timestamp, self.edges[-1].timestamp)

    @cached_property
    def timestamps(self) -> np.ndarray:
        return np.fromiter((e.timestamp for e in self.edges), dtype=np.float64, count=len(self.edges))

    def level_counts(self) -> list[int]:
        levels = np.fromiter((e.level for e in self.edges), dtype=np.int64, count=len(self.edges))
        return np.bincount(levels, minlength=self.scheme.cardinality).tolist()
