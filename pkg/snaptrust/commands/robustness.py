import logging
from dataclasses import replace

import pandas as pd

from ..base import ConfigError, DataError
from ..config import RunConfig
from ..evaluation import export_explanations, prepare_subtask, run_task, train_subtask
from ..evaluation.report import metric_table, plot_attention, plot_coefficients, write_table
from ..graph import DynamicGraph, label_nodes
from ..model import TrainConfig
from .base import (
    BaseCommand,
    CommandResult,
    load_graph,
    load_snapshots,
    robustness_train_upto,
    write_run_manifest,
)

logger = logging.getLogger(__name__)


def with_defense(config: TrainConfig, enabled: bool) -> TrainConfig:
    return replace(config, spatial=replace(config.spatial, defense_enabled=enabled))


def dense_query(graph: DynamicGraph, query: tuple[int, int]) -> tuple[int, int]:
    """Map a query given in dataset ids onto dense node ids."""
    if not graph.original_ids:
        return query
    dense = {raw: node for node, raw in enumerate(graph.original_ids)}
    missing = [node for node in query if node not in dense]
    if missing:
        raise DataError(f"query nodes {missing} do not occur in the dataset")
    return dense[query[0]], dense[query[1]]


class AttackCommand(BaseCommand):
    """Inject a collaborative attack and compare the defense switched on and off."""

    name = "attack"

    def __call__(self, config: RunConfig) -> CommandResult:
        if config.attack_spec() is None:
            raise ConfigError("attack needs --attack bad, good or onoff")
        train_upto = robustness_train_upto(config)
        spec = config.task_spec(train_upto=train_upto)
        directory = self.output_dir(config)
        graph = load_graph(config)
        base_config = config.train_config()
        reports = {
            (str(spec.kind), f"defense_{state}"): run_task(
                graph, spec, with_defense(base_config, enabled), workers=config.workers
            )
            for state, enabled in (("on", True), ("off", False))
        }
        table = metric_table(reports)
        artifacts = write_table(table, directory, "attack")

        per_seed = {
            name: report.subtask_frame().groupby("seed")["mcc"].mean()
            for (_, name), report in reports.items()
        }
        gap = pd.DataFrame({"mcc_on": per_seed["defense_on"], "mcc_off": per_seed["defense_off"]})
        gap["gap"] = gap["mcc_on"] - gap["mcc_off"]
        gap_path = directory / "defense_gap.csv"
        gap.reset_index().to_csv(gap_path, index=False)
        artifacts.append(gap_path)

        data = prepare_subtask(
            load_snapshots(config, graph),
            spec,
            train_upto,
            spec.seeds[0],
            graph=graph,
            labels=label_nodes(graph.edges, graph.scheme),
        )
        if data.report is not None:
            artifacts.append(data.report.write(directory / "injections.csv"))
        artifacts.append(write_run_manifest(directory, self.name, config))
        logger.info(
            "attack kind=%s positive_seeds=%d/%d mean_gap=%.4f",
            spec.attack.kind,
            int((gap["gap"] > 0).sum()),
            len(gap),
            float(gap["gap"].mean()),
        )
        return CommandResult(output=table.to_string(index=False), artifacts=tuple(artifacts))


class ExplainCommand(BaseCommand):
    """Coefficient, attention and path explanations for one trained subtask."""

    name = "explain"

    def __call__(self, config: RunConfig) -> CommandResult:
        train_upto = robustness_train_upto(config)
        spec = config.task_spec(train_upto=train_upto)
        directory = self.output_dir(config)
        graph = load_graph(config)
        labels = label_nodes(graph.edges, graph.scheme) if spec.attack is not None else None
        data = prepare_subtask(
            load_snapshots(config, graph),
            spec,
            train_upto,
            spec.seeds[0],
            graph=graph,
            labels=labels,
        )
        cardinality = graph.scheme.cardinality
        base_config = config.train_config()
        defended = train_subtask(data, with_defense(base_config, True), spec.variant, cardinality)
        undefended = train_subtask(data, with_defense(base_config, False), spec.variant, cardinality)
        query = dense_query(graph, config.query) if config.query else None
        bundle = export_explanations(
            defended,
            data.train_snapshots,
            undefended=undefended,
            report=data.report,
            query=query,
        )
        artifacts = bundle.write(directory)
        if config.output["plots"]:
            artifacts.append(plot_coefficients(bundle, directory / "coefficients.png"))
            artifacts.append(plot_attention(bundle, directory / "attention_trend.png"))
        artifacts.append(write_run_manifest(directory, self.name, config))

        summary = bundle.coefficient_summary
        lines = [f"{key}={value:.4f}" for key, value in summary.items() if value is not None]
        if bundle.prediction is not None:
            lines.append("prediction=" + ",".join(f"{p:.4f}" for p in bundle.prediction))
        if query is not None:
            lines.append(f"paths={bundle.paths['path'].nunique() if bundle.has_paths else 0}")
        return CommandResult(output="\n".join(lines), artifacts=tuple(artifacts))
