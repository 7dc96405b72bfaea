import logging

from ..base import ConfigError
from ..config import RunConfig
from ..evaluation import (
    SWEEP_PARAMETERS,
    comparison_table,
    paired_subtasks,
    run_ablation,
    run_task,
    sensitivity_sweep,
)
from ..evaluation.report import metric_table, plot_sweep, write_table
from .base import BaseCommand, CommandResult, load_graph, write_run_manifest

logger = logging.getLogger(__name__)


class EvaluateCommand(BaseCommand):
    """Run one prediction task and write the task x model x metric table."""

    name = "evaluate"

    def __call__(self, config: RunConfig) -> CommandResult:
        spec = config.task_spec()
        directory = self.output_dir(config)
        graph = load_graph(config)
        report = run_task(graph, spec, config.train_config(), workers=config.workers)

        table = metric_table({(str(spec.kind), str(spec.variant)): report})
        artifacts = write_table(table, directory, "metrics")
        subtasks = directory / "subtasks.csv"
        report.subtask_frame().to_csv(subtasks, index=False)
        artifacts.append(subtasks)
        artifacts.append(write_run_manifest(directory, self.name, config))
        if report.skipped:
            logger.warning("skipped_subtasks=%d", len(report.skipped))
        return CommandResult(output=table.to_string(index=False), artifacts=tuple(artifacts))


class AblateCommand(BaseCommand):
    """Every model variant on the same task, seeds and splits."""

    name = "ablate"

    def __call__(self, config: RunConfig) -> CommandResult:
        spec = config.task_spec()
        directory = self.output_dir(config)
        graph = load_graph(config)
        reports = run_ablation(graph, spec, config=config.train_config(), workers=config.workers)

        table = comparison_table(reports)
        artifacts = write_table(table, directory, "ablation")
        paired = directory / "paired_mcc.csv"
        paired_subtasks(reports).to_csv(paired, index=False)
        artifacts.append(paired)
        artifacts.append(write_run_manifest(directory, self.name, config))
        return CommandResult(output=table.to_string(index=False), artifacts=tuple(artifacts))


class SweepCommand(BaseCommand):
    """Task metrics as one hyperparameter varies."""

    name = "sweep"

    def __call__(self, config: RunConfig) -> CommandResult:
        parameter, values = config.sweep["parameter"], config.sweep["values"]
        if parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"sweep needs --sweep-param, one of {list(SWEEP_PARAMETERS)}")
        if not values:
            raise ConfigError("sweep needs at least one --sweep-values entry")
        spec = config.task_spec()
        directory = self.output_dir(config)
        graph = load_graph(config)
        frame = sensitivity_sweep(
            graph, parameter, values, config.train_config(), spec, workers=config.workers
        )
        artifacts = write_table(frame, directory, f"sweep_{parameter}")
        if config.output["plots"]:
            artifacts.append(plot_sweep(frame, directory / f"sweep_{parameter}.png"))
        artifacts.append(write_run_manifest(directory, self.name, config))
        return CommandResult(output=frame.to_string(index=False), artifacts=tuple(artifacts))
