from . import tensor as ops
from .adam import AdamState, adam_step
from .params import ParameterStore, glorot_bound
from .tensor import Tensor, as_tensor, backward

__all__ = [
    "AdamState",
    "ParameterStore",
    "Tensor",
    "adam_step",
    "as_tensor",
    "backward",
    "glorot_bound",
    "ops",
]
