import json
import logging
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import ClassVar

from ..base import SnapTrustError
from ..config import RunConfig
from ..graph import DynamicGraph, Snapshot, load_edge_list, segment

logger = logging.getLogger(__name__)


class BaseCommand(metaclass=ABCMeta):
    """Abstract base class for command-line pipelines."""

    name: ClassVar[str]

    @abstractmethod
    def __call__(self, config: RunConfig) -> "CommandResult":
        """Runs the pipeline and writes its artifacts under the output directory."""
        ...

    def output_dir(self, config: RunConfig) -> Path:
        directory = config.output_dir(self.name)
        directory.mkdir(parents=True, exist_ok=True)
        return directory


@dataclass(kw_only=True, frozen=True)
class CommandResult:
    """Represents the result of a command execution."""

    output: str | None = None
    error: str | None = None
    artifacts: tuple[Path, ...] = ()
    exit_status: int = 0

    def __bool__(self):
        return any(getattr(self, field.name) for field in fields(self))

    def __add__(self, other: "CommandResult"):
        def combine_fields(field: str | None, other_field: str | None):
            if field and other_field:
                return field + "\n" + other_field
            return field or other_field

        return CommandResult(
            output=combine_fields(self.output, other.output),
            error=combine_fields(self.error, other.error),
            artifacts=self.artifacts + other.artifacts,
            exit_status=max(self.exit_status, other.exit_status),
        )

    def replace(self, **kwargs):
        """Returns a new CommandResult with the given fields replaced."""
        return replace(self, **kwargs)


class CommandFailure(CommandResult):
    """A CommandResult that represents a failure."""

    @classmethod
    def from_error(cls, error: SnapTrustError) -> "CommandFailure":
        return cls(error=error.message, exit_status=error.exit_status)


def write_run_manifest(directory: Path, command: str, config: RunConfig) -> Path:
    """Resolved config and seeds of one run, enough to repeat it."""
    path = directory / "manifest.json"
    manifest = {"command": command, "seeds": list(config.seeds), "config": config.to_dict()}
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def load_graph(config: RunConfig) -> DynamicGraph:
    graph = load_edge_list(
        config.dataset, config.scheme, allow_self_loops=config.data["allow_self_loops"]
    )
    logger.info(
        "dataset=%s nodes=%d edges=%d", config.dataset, graph.node_count, graph.edge_count
    )
    return graph


def load_snapshots(config: RunConfig, graph: DynamicGraph) -> list[Snapshot]:
    return segment(graph, config.snapshot_count, config.data["segmentation"])


def robustness_train_upto(config: RunConfig) -> int:
    """Training prefix for attack experiments: the first 7 snapshots when there is room."""
    return config.train_upto(min(7, config.snapshot_count - config.task["horizon"]))
