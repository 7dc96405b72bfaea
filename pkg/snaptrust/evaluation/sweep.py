"""Sensitivity of the task metrics to one hyperparameter at a time."""

import logging
from collections.abc import Sequence
from dataclasses import replace
from typing import Literal

import pandas as pd

from ..base import ConfigError
from ..graph import DynamicGraph
from ..model import TrainConfig
from .tasks import TaskSpec, run_task

logger = logging.getLogger(__name__)

SweepParameter = Literal[
    "propagation_length", "heads", "prune_threshold", "snapshot_count", "segmentation"
]
SWEEP_PARAMETERS: tuple[str, ...] = (
    "propagation_length",
    "heads",
    "prune_threshold",
    "snapshot_count",
    "segmentation",
)


def configure(
    spec: TaskSpec, config: TrainConfig, parameter: SweepParameter, value
) -> tuple[TaskSpec, TrainConfig]:
    """Apply one swept value to the task spec or training config."""
    match parameter:
        case "propagation_length":
            spatial = replace(config.spatial, layer_count=int(value), layer_dims=None)
            return spec, replace(config, spatial=spatial)
        case "heads":
            return spec, replace(config, temporal=replace(config.temporal, heads=int(value)))
        case "prune_threshold":
            spatial = replace(config.spatial, prune_threshold=float(value))
            return spec, replace(config, spatial=spatial)
        case "snapshot_count":
            return replace(spec, snapshot_count=int(value)), config
        case "segmentation":
            return replace(spec, segmentation=value), config
    raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {parameter}")


def sensitivity_sweep(
    graph: DynamicGraph,
    parameter: SweepParameter,
    values: Sequence,
    config: TrainConfig,
    spec: TaskSpec | None = None,
    *,
    workers: int | None = 1,
    progress: bool = False,
) -> pd.DataFrame:
    """One task run per value with shared seeds; returns ``(value, mcc, auc, ...)`` records."""
    spec = spec or TaskSpec()
    if not values:
        raise ConfigError("a sweep needs at least one value")
    rows = []
    for value in values:
        swept_spec, swept_config = configure(spec, config, parameter, value)
        logger.info("sweep parameter=%s value=%s", parameter, value)
        report = run_task(graph, swept_spec, swept_config, workers=workers, progress=progress)
        rows.append(
            {
                "parameter": parameter,
                "value": value,
                "mcc": report.mcc,
                "mcc_std": report.std["mcc"],
                "auc": report.auc,
                "auc_std": report.std["auc"],
            }
        )
    return pd.DataFrame(rows)
