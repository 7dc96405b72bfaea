"""Attackers that alternate between defaming and honestly rating their targets."""

import logging
from collections.abc import Sequence

import numpy as np

from ..base import ConfigError, NothingToAttackError
from ..graph import Label, NodeLabel, Snapshot, label_map
from .base import (
    AttackKind,
    AttackSpec,
    BaseAttack,
    InjectedEdge,
    InjectionReport,
    apply_injections,
    attacker_pool,
    candidate_nodes,
    check_train_upto,
    draw_attackers,
    edges_per_target,
    evaluation_region,
    injected_edge,
    node_count_after,
    select_targets,
)

logger = logging.getLogger(__name__)


def is_malicious_slot(position: int) -> bool:
    """Timeslots 1, 3, 5, ... (1-based) are the attacking ones."""
    return position % 2 == 0


class OnOffAttack(BaseAttack):
    kind = AttackKind.ON_OFF

    def honest_level(self, label: Label | None) -> int:
        if label == Label.BAD:
            return self.scheme.min_trust_level
        return self.scheme.max_trust_level

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
        if len(snapshots) < 2:
            raise ConfigError(f"an on-off attack needs >= 2 snapshots, got {len(snapshots)}")
        check_train_upto(snapshots, train_upto)
        if spec.attacker_pool == 0:
            return snapshots, InjectionReport(kind=spec.kind)

        rng = np.random.default_rng(spec.seed)
        candidates = candidate_nodes(evaluation_region(snapshots, train_upto), labels, Label.GOOD)
        if not candidates:
            raise NothingToAttackError("no Good nodes to target with an on-off attack")
        targets = select_targets(candidates, spec.target_fraction, rng)
        counts = edges_per_target(targets, spec, snapshots, train_upto)
        pool = attacker_pool(
            spec, spec.attacker_pool or max(counts.values()), snapshots, targets, rng
        )
        by_node = label_map(labels)

        injected: list[InjectedEdge] = []
        per_target = {target: 0 for target in targets}
        used: set[int] = set()
        first = train_upto if train_upto is not None and not spec.poison_training else 0
        for position, snapshot in enumerate(snapshots):
            if position < first:
                continue
            malicious = is_malicious_slot(position)
            for target in targets:
                level = (
                    self.scheme.min_trust_level
                    if malicious
                    else self.honest_level(by_node.get(target))
                )
                for attacker in draw_attackers(pool, counts[target], rng).tolist():
                    used.add(attacker)
                    per_target[target] += 1
                    injected.append(
                        InjectedEdge(
                            snapshot=position,
                            edge=injected_edge(snapshot, attacker, target, level, rng, malicious),
                        )
                    )

        modified = apply_injections(snapshots, injected, node_count_after(snapshots, pool))
        report = InjectionReport(
            kind=spec.kind,
            edges=tuple(injected),
            targets=tuple(targets),
            attackers=tuple(sorted(used)),
            per_target=per_target,
        )
        logger.info(
            "attack=%s targets=%d injected=%d malicious_per_snapshot=%s",
            spec.kind,
            len(targets),
            len(injected),
            report.malicious_counts(len(snapshots)),
        )
        return modified, report


def inject_on_off(
    snapshots: Sequence[Snapshot],
    labels: Sequence[NodeLabel],
    spec: AttackSpec,
    *,
    scheme,
    train_upto: int | None = None,
) -> tuple[list[Snapshot], InjectionReport]:
    return OnOffAttack(scheme)(snapshots, labels, spec, train_upto=train_upto)
