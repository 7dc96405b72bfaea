from collections.abc import Sequence

import numpy as np

from ..graph import Label, NodeLabel, Snapshot
from .base import AttackKind, AttackSpec, CollaborativeAttack, InjectionReport


class GoodMouthingAttack(CollaborativeAttack):
    """Colluding attackers give every Bad node the highest trust level."""

    kind = AttackKind.GOOD_MOUTHING
    target_label = Label.BAD

    def level(self) -> int:
        return self.scheme.max_trust_level

    def select(self, candidates: list[int], spec: AttackSpec, rng: np.random.Generator) -> list[int]:
        return list(candidates)


def inject_good_mouthing(
    snapshots: Sequence[Snapshot],
    labels: Sequence[NodeLabel],
    spec: AttackSpec,
    *,
    scheme,
    train_upto: int | None = None,
) -> tuple[list[Snapshot], InjectionReport]:
    return GoodMouthingAttack(scheme)(snapshots, labels, spec, train_upto=train_upto)
