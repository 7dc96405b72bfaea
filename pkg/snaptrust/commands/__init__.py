from .base import BaseCommand, CommandFailure, CommandResult
from .collection import CommandCollection

__all__ = [
    "BaseCommand",
    "CommandCollection",
    "CommandFailure",
    "CommandResult",
]
