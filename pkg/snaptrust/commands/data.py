import json
import logging

from ..config import RunConfig
from ..graph import Label, edge_homophily_ratio, label_nodes, write_manifest
from .base import BaseCommand, CommandResult, load_graph, load_snapshots, write_run_manifest

logger = logging.getLogger(__name__)


class IngestCommand(BaseCommand):
    """Load an edge list, segment it and write the snapshot manifest."""

    name = "ingest"

    def __call__(self, config: RunConfig) -> CommandResult:
        directory = self.output_dir(config)
        graph = load_graph(config)
        snapshots = load_snapshots(config, graph)
        manifest = write_manifest(snapshots, graph.scheme, directory / "snapshots.jsonl")
        start, end = graph.time_span
        lines = [
            f"nodes={graph.node_count} edges={graph.edge_count} span=[{start:.0f}, {end:.0f}]",
            *(
                f"snapshot={s.index} edges={len(s.edges)} nodes={len(s.nodes)}"
                for s in snapshots
            ),
        ]
        return CommandResult(
            output="\n".join(lines),
            artifacts=(manifest, write_run_manifest(directory, self.name, config)),
        )


class HomophilyCommand(BaseCommand):
    """Edge homophily ratio under the Good/Bad node labeling."""

    name = "homophily"

    def __call__(self, config: RunConfig) -> CommandResult:
        directory = self.output_dir(config)
        graph = load_graph(config)
        labels = label_nodes(graph.edges, graph.scheme)
        ratio = edge_homophily_ratio(graph, labels)
        good = sum(1 for label in labels if label.label is Label.GOOD)
        logger.info("homophily ratio=%.4f good=%d bad=%d", ratio, good, len(labels) - good)
        path = directory / "homophily.json"
        path.write_text(
            json.dumps(
                {"ratio": ratio, "good_nodes": good, "bad_nodes": len(labels) - good},
                indent=2,
            )
            + "\n"
        )
        return CommandResult(
            output=f"homophily={ratio:.4f}",
            artifacts=(path, write_run_manifest(directory, self.name, config)),
        )
