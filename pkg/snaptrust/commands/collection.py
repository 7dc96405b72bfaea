"""Collection classes for managing the command pipelines."""

import logging

from ..base import SnapTrustError
from ..config import RunConfig
from .base import BaseCommand, CommandFailure, CommandResult
from .data import HomophilyCommand, IngestCommand
from .evaluate import AblateCommand, EvaluateCommand, SweepCommand
from .robustness import AttackCommand, ExplainCommand
from .training import TrainCommand

logger = logging.getLogger(__name__)


class CommandCollection:
    """A collection of command pipelines keyed by name."""

    def __init__(self, *commands: BaseCommand):
        self.commands = commands
        self.command_map = {command.name: command for command in commands}

    @classmethod
    def default(cls) -> "CommandCollection":
        return cls(
            IngestCommand(),
            TrainCommand(),
            EvaluateCommand(),
            AttackCommand(),
            AblateCommand(),
            SweepCommand(),
            ExplainCommand(),
            HomophilyCommand(),
        )

    @property
    def names(self) -> list[str]:
        return list(self.command_map)

    def run(self, *, name: str, config: RunConfig) -> CommandResult:
        command = self.command_map.get(name)
        if not command:
            return CommandFailure(error=f"Command {name} is invalid", exit_status=2)
        try:
            return command(config)
        except SnapTrustError as e:
            logger.error("command=%s status=%d error=%s", name, e.exit_status, e.message)
            return CommandFailure.from_error(e)
