"""Run configuration: built-in profiles, config files and command-line overrides.

Later sources win: profile defaults, then the JSON config file, then flags.
The merged mapping is validated against ``RUN_CONFIG_SCHEMA`` before any
section object is built, so unknown keys fail early.
"""

import copy
import json
import os
from dataclasses import asdict, dataclass, field
from ._compat import StrEnum
from pathlib import Path
from typing import Any

import jsonschema

from .attacks import AttackSpec
from .base import ConfigError
from .evaluation import TaskSpec
from .graph import SCHEMES, TrustLevelScheme
from .model import SpatialConfig, TemporalConfig, TrainConfig

OUTPUT_ROOT_ENV = "SNAPTRUST_OUTPUT_ROOT"
SECTIONS = ("data", "spatial", "temporal", "train", "task", "attack", "output", "sweep")


class Profile(StrEnum):
    OTC = "otc"
    ALPHA = "alpha"


PROFILE_DEFAULTS: dict[Profile, dict[str, dict[str, Any]]] = {
    Profile.OTC: {"temporal": {"heads": 8}, "spatial": {"threshold": 0.5}},
    Profile.ALPHA: {"temporal": {"heads": 16}, "spatial": {"threshold": 0.3}},
}


def default_output_root() -> str:
    return os.getenv(OUTPUT_ROOT_ENV) or "runs"


def _defaults() -> dict[str, dict[str, Any]]:
    return {
        "data": {
            "dataset": None,
            "scheme": "bitcoin",
            "snapshots": 10,
            "segmentation": "time",
            "allow_self_loops": False,
        },
        "spatial": {
            "layers": 3,
            "layer_dims": None,
            "initial_dim": 64,
            "threshold": 0.5,
            "defense": True,
            "structural_dropout": 0.0,
        },
        "temporal": {"mode": "attention", "heads": 8, "dropout": 0.5, "decay_scale": 1.0},
        "train": {
            "learning_rate": 0.005,
            "epochs": 50,
            "patience": 10,
            "l2": 1e-5,
            "validation_fraction": 0.05,
            "hidden_dim": None,
            "train_initial_embeddings": True,
        },
        "task": {
            "kind": "single",
            "train_upto": None,
            "horizon": 1,
            "variant": "full",
            "seeds": [0, 1, 2, 3, 4],
            "unobserved_rule": "any",
        },
        "attack": {
            "kind": "none",
            "target_fraction": 0.1,
            "edges_per_target": None,
            "attacker_pool": None,
            "seed": 0,
            "fresh_attackers": True,
            "poison_training": True,
        },
        "output": {"directory": None, "plots": False, "workers": None, "query": None},
        "sweep": {"parameter": None, "values": None},
    }


def _section(properties: dict[str, Any]) -> dict[str, Any]:
    return {"type": "object", "additionalProperties": False, "properties": properties}


_INT = {"type": "integer"}
_BOOL = {"type": "boolean"}
_OPTIONAL_INT = {"type": ["integer", "null"]}

RUN_CONFIG_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "profile": {"enum": [p.value for p in Profile]},
        "data": _section(
            {
                "dataset": {"type": ["string", "null"]},
                "scheme": {"enum": ["bitcoin", "advogato"]},
                "snapshots": {"type": "integer", "minimum": 1},
                "segmentation": {"enum": ["time", "event"]},
                "allow_self_loops": _BOOL,
            }
        ),
        "spatial": _section(
            {
                "layers": {"type": "integer", "minimum": 1},
                "layer_dims": {
                    "type": ["array", "null"],
                    "items": {"type": "integer", "minimum": 1},
                },
                "initial_dim": {"type": "integer", "minimum": 1},
                "threshold": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "defense": _BOOL,
                "structural_dropout": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
            }
        ),
        "temporal": _section(
            {
                "mode": {"enum": ["attention", "mean", "decay"]},
                "heads": {"type": "integer", "minimum": 1},
                "dropout": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "decay_scale": {"type": "number", "exclusiveMinimum": 0},
            }
        ),
        "train": _section(
            {
                "learning_rate": {"type": "number", "exclusiveMinimum": 0},
                "epochs": {"type": "integer", "minimum": 1},
                "patience": {"type": ["integer", "null"], "minimum": 1},
                "l2": {"type": "number", "minimum": 0},
                "validation_fraction": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "hidden_dim": _OPTIONAL_INT,
                "train_initial_embeddings": _BOOL,
            }
        ),
        "task": _section(
            {
                "kind": {"enum": ["single", "multi", "unobserved"]},
                "train_upto": _OPTIONAL_INT,
                "horizon": {"type": "integer", "minimum": 1},
                "variant": {
                    "enum": [
                        "full",
                        "trustor_only",
                        "trustee_only",
                        "temporal_mean",
                        "temporal_decay",
                        "static_mean",
                    ]
                },
                "seeds": {"type": "array", "items": _INT, "minItems": 1},
                "unobserved_rule": {"enum": ["any", "all"]},
            }
        ),
        "attack": _section(
            {
                "kind": {"enum": ["none", "bad", "good", "onoff"]},
                "target_fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "edges_per_target": _OPTIONAL_INT,
                "attacker_pool": _OPTIONAL_INT,
                "seed": _INT,
                "fresh_attackers": _BOOL,
                "poison_training": _BOOL,
            }
        ),
        "output": _section(
            {
                "directory": {"type": ["string", "null"]},
                "plots": _BOOL,
                "workers": {"type": ["integer", "null"], "minimum": 1},
                "query": {
                    "type": ["array", "null"],
                    "items": _INT,
                    "minItems": 2,
                    "maxItems": 2,
                },
            }
        ),
        "sweep": _section(
            {
                "parameter": {
                    "enum": [
                        None,
                        "propagation_length",
                        "heads",
                        "prune_threshold",
                        "snapshot_count",
                        "segmentation",
                    ]
                },
                "values": {
                    "type": ["array", "null"],
                    "items": {"type": ["number", "string"]},
                    "minItems": 1,
                },
            }
        ),
    },
}


def infer_profile(dataset: str | None) -> Profile:
    if dataset and "alpha" in Path(dataset).name.lower():
        return Profile.ALPHA
    return Profile.OTC


def merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Recursively overlay ``override`` on ``base``; None values in ``override`` are ignored."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        elif value is not None:
            merged[key] = value
    return merged


def load_config_file(path: str | Path) -> dict[str, Any]:
    try:
        content = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} does not exist") from None
    except json.JSONDecodeError as error:
        raise ConfigError(f"config file {path} is not valid JSON: {error}") from None
    if not isinstance(content, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return content


def validate(mapping: dict[str, Any]):
    try:
        jsonschema.validate(mapping, RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as error:
        where = "/".join(str(part) for part in error.absolute_path) or "<root>"
        raise ConfigError(f"invalid configuration at {where}: {error.message}") from None


@dataclass(kw_only=True, frozen=True)
class RunConfig:
    """Fully resolved configuration of one command invocation."""

    profile: Profile
    data: dict[str, Any]
    spatial: dict[str, Any]
    temporal: dict[str, Any]
    train: dict[str, Any]
    task: dict[str, Any]
    attack: dict[str, Any]
    output: dict[str, Any] = field(default_factory=dict)
    sweep: dict[str, Any] = field(default_factory=dict)

    @property
    def dataset(self) -> Path:
        if not self.data["dataset"]:
            raise ConfigError("no dataset given; pass --dataset or set data.dataset")
        return Path(self.data["dataset"])

    @property
    def scheme(self) -> TrustLevelScheme:
        return SCHEMES[self.data["scheme"]]

    @property
    def snapshot_count(self) -> int:
        return self.data["snapshots"]

    @property
    def workers(self) -> int | None:
        return self.output["workers"]

    @property
    def query(self) -> tuple[int, int] | None:
        query = self.output["query"]
        return (query[0], query[1]) if query else None

    @property
    def seeds(self) -> tuple[int, ...]:
        return tuple(self.task["seeds"])

    def output_dir(self, command: str) -> Path:
        """``--out`` when given, otherwise ``<output root>/<command>``."""
        if self.output["directory"]:
            return Path(self.output["directory"])
        return Path(default_output_root()) / command

    def train_upto(self, default: int) -> int:
        return self.task["train_upto"] if self.task["train_upto"] is not None else default

    def train_config(self, seed: int | None = None) -> TrainConfig:
        spatial, temporal, train = self.spatial, self.temporal, self.train
        return TrainConfig(
            learning_rate=train["learning_rate"],
            max_epochs=train["epochs"],
            patience=train["patience"],
            l2=train["l2"],
            validation_fraction=train["validation_fraction"],
            seed=self.seeds[0] if seed is None else seed,
            hidden_dim=train["hidden_dim"],
            train_initial_embeddings=train["train_initial_embeddings"],
            spatial=SpatialConfig(
                layer_count=spatial["layers"],
                layer_dims=tuple(spatial["layer_dims"]) if spatial["layer_dims"] else None,
                initial_dim=spatial["initial_dim"],
                prune_threshold=spatial["threshold"],
                defense_enabled=spatial["defense"],
                structural_dropout=spatial["structural_dropout"],
            ),
            temporal=TemporalConfig(
                mode=temporal["mode"],
                heads=temporal["heads"],
                dropout=temporal["dropout"],
                decay_scale=temporal["decay_scale"],
            ),
        )

    def attack_spec(self) -> AttackSpec | None:
        attack = dict(self.attack)
        if attack.pop("kind") == "none":
            return None
        return AttackSpec(kind=self.attack["kind"], **attack)

    def task_spec(self, *, train_upto: int | None = None) -> TaskSpec:
        task = self.task
        return TaskSpec(
            kind=task["kind"],
            train_upto=train_upto if train_upto is not None else task["train_upto"],
            horizon=task["horizon"],
            segmentation=self.data["segmentation"],
            snapshot_count=self.data["snapshots"],
            attack=self.attack_spec(),
            variant=task["variant"],
            seeds=self.seeds,
            unobserved_rule=task["unobserved_rule"],
        )

    def to_dict(self) -> dict[str, Any]:
        return json.loads(json.dumps(asdict(self)))


def resolve_config(
    overrides: dict[str, Any] | None = None,
    *,
    config_file: str | Path | None = None,
    profile: str | None = None,
) -> RunConfig:
    """Merge profile defaults, the optional config file and ``overrides``, then validate."""
    overrides = overrides or {}
    from_file = load_config_file(config_file) if config_file else {}
    dataset = (overrides.get("data") or {}).get("dataset") or (from_file.get("data") or {}).get(
        "dataset"
    )
    chosen = profile or from_file.get("profile") or infer_profile(dataset)
    try:
        chosen = Profile(chosen)
    except ValueError:
        raise ConfigError(
            f"profile must be one of {[p.value for p in Profile]}, got {chosen}"
        ) from None

    mapping = merge(_defaults(), PROFILE_DEFAULTS[chosen])
    mapping = merge(mapping, {k: v for k, v in from_file.items() if k != "profile"})
    mapping = merge(mapping, overrides)
    mapping["profile"] = chosen.value
    validate(mapping)
    config = RunConfig(
        profile=chosen,
        **{name: mapping[name] for name in SECTIONS},
    )
    # Cross-field checks live in the typed sections; build them once before any work.
    config.train_config()
    config.attack_spec()
    return config
