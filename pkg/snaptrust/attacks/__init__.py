from .bad_mouthing import BadMouthingAttack, inject_bad_mouthing
from .base import AttackKind, AttackSpec, BaseAttack, InjectedEdge, InjectionReport
from .collection import AttackCollection
from .good_mouthing import GoodMouthingAttack, inject_good_mouthing
from .on_off import OnOffAttack, inject_on_off

__all__ = [
    "AttackCollection",
    "AttackKind",
    "AttackSpec",
    "BadMouthingAttack",
    "BaseAttack",
    "GoodMouthingAttack",
    "InjectedEdge",
    "InjectionReport",
    "OnOffAttack",
    "inject_bad_mouthing",
    "inject_good_mouthing",
    "inject_on_off",
]
