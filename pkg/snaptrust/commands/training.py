import logging

from ..attacks import AttackCollection
from ..base import ConfigError
from ..config import RunConfig
from ..evaluation.explain import attention_trend
from ..graph import label_nodes
from ..loop import train
from .base import BaseCommand, CommandResult, load_graph, load_snapshots, write_run_manifest

logger = logging.getLogger(__name__)


class TrainCommand(BaseCommand):
    """
    Fit one model on the first ``train_upto`` snapshots and write its checkpoint,
    epoch log, robust coefficients and attention trend.
    """

    name = "train"

    def __call__(self, config: RunConfig) -> CommandResult:
        directory = self.output_dir(config)
        graph = load_graph(config)
        snapshots = load_snapshots(config, graph)
        train_upto = config.train_upto(max(len(snapshots) - 1, 1))
        if not 1 <= train_upto <= len(snapshots):
            raise ConfigError(f"train_upto {train_upto} does not fit {len(snapshots)} snapshots")
        spec = config.attack_spec()
        report = None
        if spec is not None:
            snapshots, report = AttackCollection.for_scheme(graph.scheme).run(
                spec=spec,
                snapshots=snapshots,
                labels=label_nodes(graph.edges, graph.scheme),
                train_upto=train_upto,
            )
        train_snapshots = snapshots[:train_upto]

        train_config = config.train_config()
        outcome = train(
            train_snapshots=train_snapshots,
            config=train_config,
            cardinality=graph.scheme.cardinality,
            node_count=max(s.node_count for s in snapshots),
            metrics_log=directory / "epochs.jsonl",
        )
        model = outcome.model
        checkpoint = model.store.save(
            directory / "model.npz",
            step=len(outcome.history),
            metadata={
                "cardinality": model.cardinality,
                "node_count": model.node_count,
                "snapshot_count": model.snapshot_count,
                "train_upto": train_upto,
                "best_epoch": outcome.best_epoch,
                "config": config.to_dict(),
            },
        )
        coefficients = directory / "coefficients.csv"
        outcome.coefficients.to_csv(coefficients, index=False)
        trend = directory / "attention_trend.csv"
        attention_trend(outcome, train_snapshots).to_csv(trend, index=False)
        artifacts = [checkpoint, directory / "epochs.jsonl", coefficients, trend]
        if report is not None:
            artifacts.append(report.write(directory / "injections.csv"))
        artifacts.append(write_run_manifest(directory, self.name, config))

        accuracy = outcome.training_accuracy()
        logger.info("checkpoint=%s accuracy=%.4f", checkpoint, accuracy)
        return CommandResult(
            output=(
                f"epochs={len(outcome.history)} best_epoch={outcome.best_epoch} "
                f"train_loss={outcome.history[-1].train_loss:.6f} train_accuracy={accuracy:.4f}"
            ),
            artifacts=tuple(artifacts),
        )
