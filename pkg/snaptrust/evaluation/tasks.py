"""Prediction tasks over snapshot sequences and their aggregated metric reports.

A task trains on the first ``t`` snapshots and predicts the trust level of
edges in the snapshot(s) right after. Without an explicit ``train_upto`` the
task sweeps every admissible ``t`` and averages the subtasks uniformly.
"""

import hashlib
import logging
from dataclasses import dataclass, field, replace
from .._compat import StrEnum
from typing import Literal

import numpy as np
import pandas as pd

from ..attacks import AttackCollection, AttackSpec, InjectionReport
from ..base import ConfigError, UndefinedMetricError
from ..graph import (
    DynamicGraph,
    NodeLabel,
    Segmentation,
    Snapshot,
    cumulative_snapshot,
    label_nodes,
    segment,
)
from ..loop import TrainOutcome, train
from ..model import TrainConfig
from .metrics import METRIC_NAMES, confusion_matrix, score_predictions
from .run import run

logger = logging.getLogger(__name__)

UnobservedRule = Literal["any", "all"]
DEFAULT_SEEDS = (0, 1, 2, 3, 4)


class TaskKind(StrEnum):
    SINGLE = "single"
    MULTI = "multi"
    UNOBSERVED = "unobserved"


class Variant(StrEnum):
    FULL = "full"
    TRUSTOR_ONLY = "trustor_only"
    TRUSTEE_ONLY = "trustee_only"
    TEMPORAL_MEAN = "temporal_mean"
    TEMPORAL_DECAY = "temporal_decay"
    STATIC_MEAN = "static_mean"


def apply_variant(config: TrainConfig, variant: Variant | str) -> TrainConfig:
    """Switch off or replace the model parts that ``variant`` ablates."""
    variant = Variant(variant)
    spatial, temporal = config.spatial, config.temporal
    match variant:
        case Variant.TRUSTOR_ONLY:
            spatial = replace(spatial, use_trustee=False)
        case Variant.TRUSTEE_ONLY:
            spatial = replace(spatial, use_trustor=False)
        case Variant.TEMPORAL_MEAN:
            temporal = replace(temporal, mode="mean")
        case Variant.TEMPORAL_DECAY:
            temporal = replace(temporal, mode="decay")
        case Variant.STATIC_MEAN:
            spatial = replace(spatial, defense_enabled=False)
            temporal = replace(temporal, mode="mean")
    return replace(config, spatial=spatial, temporal=temporal)


@dataclass(kw_only=True, frozen=True)
class TaskSpec:
    kind: TaskKind = TaskKind.SINGLE
    train_upto: int | None = None
    horizon: int = 1
    segmentation: Segmentation = Segmentation.TIME
    snapshot_count: int = 10
    attack: AttackSpec | None = None
    variant: Variant = Variant.FULL
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    unobserved_rule: UnobservedRule = "any"

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", TaskKind(self.kind))
            object.__setattr__(self, "variant", Variant(self.variant))
            object.__setattr__(self, "segmentation", Segmentation(self.segmentation))
        except ValueError as error:
            raise ConfigError(str(error)) from None
        if self.kind is not TaskKind.MULTI and self.horizon != 1:
            raise ConfigError(f"horizon applies to the multi task only, got {self.horizon}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.snapshot_count < 3:
            raise ConfigError(f"a task needs >= 3 snapshots, got {self.snapshot_count}")
        if self.train_upto is not None:
            self.check_train_upto(self.train_upto)
        elif not self.train_points():
            raise ConfigError(
                f"no admissible training point for {self.snapshot_count} snapshots and horizon {self.horizon}"
            )
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.unobserved_rule not in ("any", "all"):
            raise ConfigError(f"unobserved rule must be 'any' or 'all', got {self.unobserved_rule}")

    def check_train_upto(self, t: int):
        if not 2 <= t <= self.snapshot_count - 1 or t + self.horizon > self.snapshot_count:
            raise ConfigError(
                f"train_upto {t} with horizon {self.horizon} does not fit {self.snapshot_count} snapshots"
            )

    def train_points(self) -> list[int]:
        if self.train_upto is not None:
            return [self.train_upto]
        return list(range(2, self.snapshot_count - self.horizon + 1))


@dataclass(kw_only=True, frozen=True)
class HeldOutEdges:
    sources: np.ndarray
    targets: np.ndarray
    levels: np.ndarray

    def __len__(self) -> int:
        return len(self.levels)


@dataclass(kw_only=True)
class SubtaskData:
    """Everything one (train_upto, seed) run needs: the split and the attack audit."""

    train_upto: int
    seed: int
    train_snapshots: list[Snapshot]
    test_snapshots: list[Snapshot]
    test: HeldOutEdges
    node_count: int
    report: InjectionReport | None = None

    def digest(self) -> str:
        """SHA-256 over the training and test edge arrays."""
        sha = hashlib.sha256()
        for snapshot in self.train_snapshots:
            for array in (snapshot.sources, snapshot.targets, snapshot.levels, snapshot.timestamps):
                sha.update(np.ascontiguousarray(array).tobytes())
        for array in (self.test.sources, self.test.targets, self.test.levels):
            sha.update(np.ascontiguousarray(array).tobytes())
        return sha.hexdigest()


def observed_nodes(snapshots: list[Snapshot], node_count: int) -> np.ndarray:
    mask = np.zeros(node_count, dtype=bool)
    for snapshot in snapshots:
        if snapshot.edges:
            mask[snapshot.sources] = True
            mask[snapshot.targets] = True
    return mask


def select_test_edges(
    test_snapshots: list[Snapshot],
    observed: np.ndarray,
    kind: TaskKind,
    unobserved_rule: UnobservedRule = "any",
) -> HeldOutEdges:
    """Original (non-injected) edges of the test snapshots that fit the task."""
    sources, targets, levels = [], [], []
    for snapshot in test_snapshots:
        original = ~snapshot.injected_mask
        src, dst = snapshot.sources[original], snapshot.targets[original]
        known_src = observed[src] if observed.size else np.zeros(src.shape, dtype=bool)
        known_dst = observed[dst] if observed.size else np.zeros(dst.shape, dtype=bool)
        if kind is TaskKind.UNOBSERVED:
            keep = ~(known_src & known_dst) if unobserved_rule == "any" else ~known_src & ~known_dst
        else:
            keep = known_src & known_dst
        sources.append(src[keep])
        targets.append(dst[keep])
        levels.append(snapshot.levels[original][keep])
    return HeldOutEdges(
        sources=np.concatenate(sources),
        targets=np.concatenate(targets),
        levels=np.concatenate(levels),
    )


def prepare_subtask(
    snapshots: list[Snapshot],
    spec: TaskSpec,
    train_upto: int,
    seed: int,
    *,
    graph: DynamicGraph,
    labels: list[NodeLabel] | None = None,
) -> SubtaskData:
    spec.check_train_upto(train_upto)
    window = list(snapshots[: train_upto + spec.horizon])
    report = None
    if spec.attack is not None:
        if labels is None:
            labels = label_nodes(graph.edges, graph.scheme)
        attack = spec.attack.replace(seed=spec.attack.seed + seed)
        window, report = AttackCollection.for_scheme(graph.scheme).run(
            spec=attack, snapshots=window, labels=labels, train_upto=train_upto
        )
    node_count = max([graph.node_count] + [s.node_count for s in window])
    train_snapshots = [s.resized(node_count) for s in window[:train_upto]]
    test_snapshots = window[train_upto:]
    observed = observed_nodes(list(snapshots[:train_upto]), graph.node_count)
    test = select_test_edges(test_snapshots, observed, spec.kind, spec.unobserved_rule)
    return SubtaskData(
        train_upto=train_upto,
        seed=seed,
        train_snapshots=train_snapshots,
        test_snapshots=test_snapshots,
        test=test,
        node_count=node_count,
        report=report,
    )


def train_subtask(
    data: SubtaskData, config: TrainConfig, variant: Variant, cardinality: int
) -> TrainOutcome:
    config = apply_variant(replace(config, seed=data.seed), variant)
    snapshots = data.train_snapshots
    if Variant(variant) is Variant.STATIC_MEAN:
        snapshots = [cumulative_snapshot(snapshots)]
    return train(
        train_snapshots=snapshots,
        config=config,
        cardinality=cardinality,
        node_count=data.node_count,
    )


@dataclass(kw_only=True)
class SubtaskResult:
    train_upto: int
    seed: int
    digest: str
    test_edges: int
    metrics: dict[str, float] = field(default_factory=dict)
    confusion: np.ndarray | None = None
    skipped: str | None = None


@dataclass(kw_only=True, frozen=True)
class SubtaskJob:
    snapshots: list[Snapshot]
    spec: TaskSpec
    config: TrainConfig
    graph: DynamicGraph
    labels: list[NodeLabel] | None
    train_upto: int
    seed: int


def run_subtask(job: SubtaskJob) -> SubtaskResult:
    data = prepare_subtask(
        job.snapshots, job.spec, job.train_upto, job.seed, graph=job.graph, labels=job.labels
    )
    result = SubtaskResult(
        train_upto=job.train_upto, seed=job.seed, digest=data.digest(), test_edges=len(data.test)
    )
    if not len(data.test):
        logger.warning("empty_task kind=%s train_upto=%d seed=%d", job.spec.kind, job.train_upto, job.seed)
        result.skipped = "empty test set"
        return result
    cardinality = job.graph.scheme.cardinality
    outcome = train_subtask(data, job.config, job.spec.variant, cardinality)
    predictions = outcome.model.predict(outcome.output, data.test.sources, data.test.targets)
    try:
        result.metrics = score_predictions(predictions.scores, data.test.levels)
    except UndefinedMetricError as error:
        logger.warning("undefined_metric train_upto=%d seed=%d reason=%s", job.train_upto, job.seed, error.message)
        result.skipped = error.message
        return result
    result.confusion = confusion_matrix(data.test.levels, predictions.predicted_level, cardinality)
    logger.info(
        "subtask train_upto=%d seed=%d edges=%d mcc=%.4f auc=%.4f",
        job.train_upto,
        job.seed,
        len(data.test),
        result.metrics["mcc"],
        result.metrics["auc"],
    )
    return result


@dataclass(kw_only=True)
class MetricReport:
    """Metrics averaged uniformly over subtasks per seed, then mean and sample std over seeds."""

    spec: TaskSpec
    subtasks: list[SubtaskResult]
    per_seed: dict[str, list[float]]
    mean: dict[str, float]
    std: dict[str, float]
    confusion: np.ndarray | None

    @property
    def mcc(self) -> float:
        return self.mean["mcc"]

    @property
    def auc(self) -> float:
        return self.mean["auc"]

    @property
    def ba(self) -> float:
        return self.mean["ba"]

    @property
    def f1_macro(self) -> float:
        return self.mean["f1_macro"]

    @property
    def skipped(self) -> list[SubtaskResult]:
        return [result for result in self.subtasks if result.skipped]

    def digests(self) -> dict[tuple[int, int], str]:
        return {(r.train_upto, r.seed): r.digest for r in self.subtasks}

    def subtask_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "train_upto": r.train_upto,
                    "seed": r.seed,
                    "test_edges": r.test_edges,
                    "digest": r.digest,
                    "skipped": r.skipped or "",
                    **{name: r.metrics.get(name, np.nan) for name in METRIC_NAMES},
                }
                for r in self.subtasks
            ]
        )

    def summary(self) -> dict[str, str]:
        return {name: f"{self.mean[name]:.3f}±{self.std[name]:.3f}" for name in METRIC_NAMES}


def aggregate(spec: TaskSpec, results: list[SubtaskResult]) -> MetricReport:
    per_seed: dict[str, list[float]] = {name: [] for name in METRIC_NAMES}
    for seed in spec.seeds:
        scored = [r for r in results if r.seed == seed and not r.skipped]
        if not scored:
            continue
        for name in METRIC_NAMES:
            per_seed[name].append(float(np.mean([r.metrics[name] for r in scored])))
    if not per_seed["mcc"]:
        raise UndefinedMetricError("every subtask was skipped; no metric can be reported")
    mean = {name: float(np.mean(values)) for name, values in per_seed.items()}
    std = {
        name: float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        for name, values in per_seed.items()
    }
    matrices = [r.confusion for r in results if r.confusion is not None]
    return MetricReport(
        spec=spec,
        subtasks=results,
        per_seed=per_seed,
        mean=mean,
        std=std,
        confusion=np.sum(matrices, axis=0) if matrices else None,
    )


def run_task(
    graph: DynamicGraph,
    spec: TaskSpec,
    config: TrainConfig,
    *,
    workers: int | None = 1,
    progress: bool = False,
) -> MetricReport:
    snapshots = segment(graph, spec.snapshot_count, spec.segmentation)
    labels = label_nodes(graph.edges, graph.scheme) if spec.attack is not None else None
    jobs = [
        SubtaskJob(
            snapshots=snapshots,
            spec=spec,
            config=config,
            graph=graph,
            labels=labels,
            train_upto=t,
            seed=seed,
        )
        for t in spec.train_points()
        for seed in spec.seeds
    ]
    logger.info(
        "task kind=%s variant=%s subtasks=%d seeds=%d",
        spec.kind,
        spec.variant,
        len(spec.train_points()),
        len(spec.seeds),
    )
    report = aggregate(spec, run(run_subtask, jobs, workers=workers, progress=progress))
    logger.info("task kind=%s variant=%s %s", spec.kind, spec.variant, report.summary())
    return report
