"""Error hierarchy shared by every snaptrust module.

Each error carries a human readable ``message`` and an ``exit_status`` category
that the command line maps onto the process exit code.
"""

from typing import ClassVar


class SnapTrustError(Exception):
    """Raised when a snaptrust operation cannot complete."""

    exit_status: ClassVar[int] = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigError(SnapTrustError):
    """Invalid configuration, task or attack settings."""

    exit_status = 2


class DataError(SnapTrustError):
    """Input data that cannot be ingested or analysed."""

    exit_status = 3


class ParseError(DataError):
    """Malformed edge-list record."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MappingError(DataError):
    """Raw rating not covered by the trust-level scheme."""


class LabelingError(DataError):
    """Scheme cannot designate Good/Bad nodes."""


class UndefinedRatioError(DataError):
    """Homophily ratio requested on an empty edge set."""


class NothingToAttackError(DataError):
    """Attack has no eligible target node."""


class UndefinedMetricError(DataError):
    """Metric is undefined for the given truths (e.g. single-class AUC)."""


class NumericError(SnapTrustError):
    """Numeric failure during model evaluation or training."""

    exit_status = 4


class DimensionError(NumericError):
    """Operands with incompatible shapes."""

    def __init__(self, operation: str, *shapes: tuple[int, ...]):
        listed = " and ".join(str(tuple(shape)) for shape in shapes)
        super().__init__(f"{operation}: incompatible shapes {listed}")
        self.operation = operation
        self.shapes = shapes


class RankError(NumericError):
    """Backward called on a non-scalar output."""


class UninitializedGradientError(NumericError):
    """Optimizer step on a parameter without a gradient."""


class AlignmentError(NumericError):
    """Messages and coefficients do not line up edge for edge."""


class IndexOutOfRangeError(NumericError):
    """Trust level or node index outside its valid range."""


class SequenceError(NumericError):
    """Temporal sequence of the wrong length or empty."""


class DivergenceError(NumericError):
    """Loss became non-finite during training."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"loss became non-finite ({loss}) at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss
