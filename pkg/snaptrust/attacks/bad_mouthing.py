from collections.abc import Sequence

from ..graph import Label, NodeLabel, Snapshot
from .base import AttackKind, AttackSpec, CollaborativeAttack, InjectionReport


class BadMouthingAttack(CollaborativeAttack):
    """Colluding attackers give Good nodes the lowest trust level."""

    kind = AttackKind.BAD_MOUTHING
    target_label = Label.GOOD

    def level(self) -> int:
        return self.scheme.min_trust_level


def inject_bad_mouthing(
    snapshots: Sequence[Snapshot],
    labels: Sequence[NodeLabel],
    spec: AttackSpec,
    *,
    scheme,
    train_upto: int | None = None,
) -> tuple[list[Snapshot], InjectionReport]:
    return BadMouthingAttack(scheme)(snapshots, labels, spec, train_upto=train_upto)
