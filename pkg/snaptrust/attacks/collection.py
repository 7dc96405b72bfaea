"""Registry of the available attacks."""

from collections.abc import Sequence

from ..base import ConfigError
from ..graph import NodeLabel, Snapshot, TrustLevelScheme
from .bad_mouthing import BadMouthingAttack
from .base import AttackKind, AttackSpec, BaseAttack, InjectionReport
from .good_mouthing import GoodMouthingAttack
from .on_off import OnOffAttack


class AttackCollection:
    """A collection of attacks keyed by kind."""

    def __init__(self, *attacks: BaseAttack):
        self.attacks = attacks
        self.attack_map = {attack.kind: attack for attack in attacks}

    @classmethod
    def for_scheme(cls, scheme: TrustLevelScheme) -> "AttackCollection":
        return cls(BadMouthingAttack(scheme), GoodMouthingAttack(scheme), OnOffAttack(scheme))

    def __contains__(self, kind: str) -> bool:
        return kind in self.attack_map

    def run(
        self,
        *,
        spec: AttackSpec,
        snapshots: Sequence[Snapshot],
        labels: Sequence[NodeLabel],
        train_upto: int | None = None,
    ) -> tuple[list[Snapshot], InjectionReport]:
        attack = self.attack_map.get(AttackKind(spec.kind))
        if not attack:
            raise ConfigError(f"Attack {spec.kind} is not available")
        return attack(snapshots, labels, spec, train_upto=train_upto)
