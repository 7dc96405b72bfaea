import logging
from abc import ABCMeta, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field, fields, replace
from .._compat import StrEnum
from math import ceil
from pathlib import Path
from typing import ClassVar

import numpy as np
import pandas as pd

from ..base import ConfigError, NothingToAttackError
from ..graph import Label, NodeLabel, Snapshot, TrustEdge, TrustLevelScheme, label_map

logger = logging.getLogger(__name__)


class AttackKind(StrEnum):
    BAD_MOUTHING = "bad"
    GOOD_MOUTHING = "good"
    ON_OFF = "onoff"


@dataclass(kw_only=True, frozen=True)
class AttackSpec:
    """What to inject, against whom, and where.

    ``edges_per_target`` of None means the target's degree in the union of the
    training snapshots (at least 1). ``attacker_pool`` of None sizes the pool to
    the largest per-target edge count.
    """

    kind: AttackKind
    target_fraction: float = 0.1
    edges_per_target: int | None = None
    attacker_pool: int | None = None
    seed: int = 0
    fresh_attackers: bool = True
    poison_training: bool = True

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", AttackKind(self.kind))
        except ValueError:
            raise ConfigError(
                f"attack kind must be one of {[k.value for k in AttackKind]}, got {self.kind}"
            ) from None
        if not 0 < self.target_fraction <= 1:
            raise ConfigError(f"target fraction must be in (0, 1], got {self.target_fraction}")
        if self.edges_per_target is not None and self.edges_per_target < 1:
            raise ConfigError(f"edges per target must be >= 1, got {self.edges_per_target}")
        if self.attacker_pool is not None and self.attacker_pool < 0:
            raise ConfigError(f"attacker pool must be >= 0, got {self.attacker_pool}")

    def replace(self, **kwargs) -> "AttackSpec":
        return replace(self, **kwargs)


@dataclass(kw_only=True, frozen=True)
class InjectedEdge:
    snapshot: int
    edge: TrustEdge


@dataclass(kw_only=True, frozen=True)
class InjectionReport:
    """Audit trail of one attack run."""

    kind: AttackKind
    edges: tuple[InjectedEdge, ...] = ()
    targets: tuple[int, ...] = ()
    attackers: tuple[int, ...] = ()
    per_target: dict[int, int] = field(default_factory=dict)

    def __bool__(self):
        return any(getattr(self, f.name) for f in fields(self) if f.name != "kind")

    def __len__(self) -> int:
        return len(self.edges)

    def __add__(self, other: "InjectionReport") -> "InjectionReport":
        if self.kind != other.kind:
            raise ConfigError(f"cannot combine {self.kind} and {other.kind} reports")
        per_target = dict(self.per_target)
        for node, count in other.per_target.items():
            per_target[node] = per_target.get(node, 0) + count
        return InjectionReport(
            kind=self.kind,
            edges=self.edges + other.edges,
            targets=tuple(sorted(set(self.targets) | set(other.targets))),
            attackers=tuple(sorted(set(self.attackers) | set(other.attackers))),
            per_target=per_target,
        )

    @property
    def affected_snapshots(self) -> tuple[int, ...]:
        return tuple(sorted({item.snapshot for item in self.edges}))

    def malicious_counts(self, snapshot_count: int) -> list[int]:
        counts = [0] * snapshot_count
        for item in self.edges:
            if item.edge.malicious:
                counts[item.snapshot] += 1
        return counts

    def records(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "snapshot": [item.snapshot for item in self.edges],
                "source": [item.edge.source for item in self.edges],
                "target": [item.edge.target for item in self.edges],
                "level": [item.edge.level for item in self.edges],
                "malicious": [item.edge.malicious for item in self.edges],
            },
            columns=["snapshot", "source", "target", "level", "malicious"],
        )

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.records().to_csv(path, index=False)
        return path


class BaseAttack(metaclass=ABCMeta):
    """Abstract base class for edge-injection attacks."""

    kind: ClassVar[AttackKind]

    def __init__(self, scheme: TrustLevelScheme):
        self.scheme = scheme

    @abstractmethod
    def __call__(
        self,
        snapshots: Sequence[Snapshot],
        labels: Sequence[NodeLabel],
        spec: AttackSpec,
        *,
        train_upto: int | None = None,
    ) -> tuple[list[Snapshot], InjectionReport]:
        """Return the modified snapshots and the report of what was injected."""
        ...

    def check_spec(self, spec: AttackSpec):
        if spec.kind != self.kind:
            raise ConfigError(f"{type(self).__name__} cannot run a {spec.kind} attack")


def training_region(snapshots: Sequence[Snapshot], train_upto: int | None) -> Sequence[Snapshot]:
    return snapshots if train_upto is None else snapshots[:train_upto]


def evaluation_region(snapshots: Sequence[Snapshot], train_upto: int | None) -> Sequence[Snapshot]:
    return snapshots if train_upto is None else snapshots[train_upto:]


def check_train_upto(snapshots: Sequence[Snapshot], train_upto: int | None):
    if train_upto is not None and not 1 <= train_upto < len(snapshots):
        raise ConfigError(
            f"train_upto must be in [1, {len(snapshots) - 1}] for {len(snapshots)} snapshots, got {train_upto}"
        )


def candidate_nodes(
    snapshots: Sequence[Snapshot], labels: Sequence[NodeLabel], label: Label
) -> list[int]:
    """Nodes carrying ``label`` that appear in any of ``snapshots``, ascending."""
    by_node = label_map(labels)
    seen: set[int] = set()
    for snapshot in snapshots:
        seen |= snapshot.nodes
    return sorted(node for node in seen if by_node.get(node) == label)


def select_targets(candidates: list[int], fraction: float, rng: np.random.Generator) -> list[int]:
    count = min(len(candidates), ceil(fraction * len(candidates)))
    return sorted(rng.choice(candidates, size=count, replace=False).tolist())


def degrees(snapshots: Sequence[Snapshot], node_count: int) -> np.ndarray:
    """Total non-self-loop degree of every node over ``snapshots``."""
    counts = np.zeros(node_count, dtype=np.int64)
    for snapshot in snapshots:
        proper = snapshot.sources != snapshot.targets
        counts += np.bincount(snapshot.sources[proper], minlength=node_count)[:node_count]
        counts += np.bincount(snapshot.targets[proper], minlength=node_count)[:node_count]
    return counts


def edges_per_target(
    targets: list[int], spec: AttackSpec, snapshots: Sequence[Snapshot], train_upto: int | None
) -> dict[int, int]:
    if spec.edges_per_target is not None:
        return {target: spec.edges_per_target for target in targets}
    node_count = max(s.node_count for s in snapshots)
    degree = degrees(training_region(snapshots, train_upto), node_count)
    return {target: max(1, int(degree[target])) for target in targets}


def attacker_pool(
    spec: AttackSpec,
    size: int,
    snapshots: Sequence[Snapshot],
    exclude: Sequence[int],
    rng: np.random.Generator,
) -> np.ndarray:
    """Fresh node ids after the current maximum, or existing non-target nodes."""
    node_count = max(s.node_count for s in snapshots)
    if spec.fresh_attackers:
        return np.arange(node_count, node_count + size)
    existing = sorted(set().union(*(s.nodes for s in snapshots)) - set(exclude))
    if not existing:
        raise ConfigError("no existing nodes are available as attackers")
    return np.sort(rng.choice(existing, size=min(size, len(existing)), replace=False))


def placement(
    snapshots: Sequence[Snapshot], target: int, spec: AttackSpec, train_upto: int | None
) -> int:
    """Position of the snapshot that receives a target's injected edges."""
    if train_upto is not None and not spec.poison_training:
        return train_upto
    end = len(training_region(snapshots, train_upto))
    for position in range(end - 1, -1, -1):
        snapshot = snapshots[position]
        if target < snapshot.node_count and snapshot.active_mask[target]:
            return position
    return end - 1


def injected_edge(
    snapshot: Snapshot,
    source: int,
    target: int,
    level: int,
    rng: np.random.Generator,
    malicious: bool,
) -> TrustEdge:
    """An injected edge with a timestamp drawn uniformly from the snapshot window."""
    if snapshot.end > snapshot.start:
        timestamp = float(rng.uniform(snapshot.start, snapshot.end))
    else:
        timestamp = snapshot.start
    return TrustEdge(
        source=int(source),
        target=int(target),
        level=level,
        timestamp=timestamp,
        injected=True,
        malicious=malicious,
    )


def apply_injections(
    snapshots: Sequence[Snapshot], injected: list[InjectedEdge], node_count: int
) -> list[Snapshot]:
    """Append injected edges to their snapshots; every snapshot is resized to ``node_count``."""
    extra: dict[int, list[TrustEdge]] = {}
    for item in injected:
        extra.setdefault(item.snapshot, []).append(item.edge)
    return [
        snapshot.with_edges(extra.get(position, ()), node_count)
        for position, snapshot in enumerate(snapshots)
    ]


def node_count_after(snapshots: Sequence[Snapshot], attackers: np.ndarray) -> int:
    current = max(s.node_count for s in snapshots)
    return max(current, int(attackers.max()) + 1) if attackers.size else current


def draw_attackers(pool: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` attackers from ``pool``, distinct whenever the pool is large enough."""
    return rng.choice(pool, size=count, replace=count > pool.size)


class CollaborativeAttack(BaseAttack):
    """A colluding group rates each target once per member, all in one snapshot."""

    target_label: ClassVar[Label]

    @abstractmethod
    def level(self) -> int:
        """Trust level every injected edge carries."""
        ...

    def select(self, candidates: list[int], spec: AttackSpec, rng: np.random.Generator) -> list[int]:
        return select_targets(candidates, spec.target_fraction, rng)

    def __call__(
        self,
        snapshots: Sequence[Snapshot],
        labels: Sequence[NodeLabel],
        spec: AttackSpec,
        *,
        train_upto: int | None = None,
    ) -> tuple[list[Snapshot], InjectionReport]:
        self.check_spec(spec)
        snapshots = list(snapshots)
        check_train_upto(snapshots, train_upto)
        rng = np.random.default_rng(spec.seed)

        candidates = candidate_nodes(evaluation_region(snapshots, train_upto), labels, self.target_label)
        if not candidates:
            raise NothingToAttackError(
                f"no {self.target_label} nodes to target with a {spec.kind} attack"
            )
        targets = self.select(candidates, spec, rng)
        counts = edges_per_target(targets, spec, snapshots, train_upto)
        pool_size = max(spec.attacker_pool or 0, max(counts.values()))
        if spec.attacker_pool is not None and spec.attacker_pool < pool_size:
            logger.warning(
                "attack=%s attacker_pool=%d enlarged_to=%d each member rates a target once",
                spec.kind,
                spec.attacker_pool,
                pool_size,
            )
        pool = attacker_pool(spec, pool_size, snapshots, targets, rng)

        injected: list[InjectedEdge] = []
        used: set[int] = set()
        for target in targets:
            position = placement(snapshots, target, spec, train_upto)
            for attacker in draw_attackers(pool, counts[target], rng).tolist():
                used.add(attacker)
                injected.append(
                    InjectedEdge(
                        snapshot=position,
                        edge=injected_edge(
                            snapshots[position], attacker, target, self.level(), rng, True
                        ),
                    )
                )

        modified = apply_injections(snapshots, injected, node_count_after(snapshots, pool))
        report = InjectionReport(
            kind=spec.kind,
            edges=tuple(injected),
            targets=tuple(targets),
            attackers=tuple(sorted(used)),
            per_target=counts,
        )
        logger.info(
            "attack=%s targets=%d injected=%d snapshots=%s",
            spec.kind,
            len(targets),
            len(injected),
            report.affected_snapshots,
        )
        return modified, report
