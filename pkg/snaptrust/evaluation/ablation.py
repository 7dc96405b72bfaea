"""Run one task under several model variants with shared seeds and splits."""

import logging
from collections.abc import Sequence
from dataclasses import replace

import pandas as pd

from ..graph import DynamicGraph
from ..model import TrainConfig
from .metrics import METRIC_NAMES
from .tasks import MetricReport, TaskSpec, Variant, run_task

logger = logging.getLogger(__name__)

DEFAULT_VARIANTS = tuple(Variant)


def run_ablation(
    graph: DynamicGraph,
    spec: TaskSpec,
    variants: Sequence[Variant | str] = DEFAULT_VARIANTS,
    config: TrainConfig | None = None,
    *,
    workers: int | None = 1,
    progress: bool = False,
) -> dict[Variant, MetricReport]:
    config = config or TrainConfig()
    reports: dict[Variant, MetricReport] = {}
    for variant in map(Variant, variants):
        logger.info("ablation variant=%s", variant)
        reports[variant] = run_task(
            graph, replace(spec, variant=variant), config, workers=workers, progress=progress
        )
    return reports


def comparison_table(reports: dict[Variant, MetricReport]) -> pd.DataFrame:
    """One row per variant, ``mean±std`` per metric."""
    return pd.DataFrame(
        [{"variant": str(variant), **report.summary()} for variant, report in reports.items()],
        columns=["variant", *METRIC_NAMES],
    )


def paired_subtasks(reports: dict[Variant, MetricReport], metric: str = "mcc") -> pd.DataFrame:
    """Per (train_upto, seed) metric values side by side, one column per variant."""
    frames = []
    for variant, report in reports.items():
        frame = report.subtask_frame()[["train_upto", "seed", metric]]
        frames.append(frame.rename(columns={metric: str(variant)}).set_index(["train_upto", "seed"]))
    return pd.concat(frames, axis=1).reset_index()
