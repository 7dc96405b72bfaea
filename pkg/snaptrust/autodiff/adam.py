"""Bias-corrected Adam over a ParameterStore."""

from dataclasses import dataclass, field

import numpy as np

from ..base import ConfigError, UninitializedGradientError
from .params import ParameterStore


@dataclass(kw_only=True)
class AdamState:
    learning_rate: float = 0.005
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning rate must be > 0, got {self.learning_rate}")


def adam_step(store: ParameterStore, state: AdamState):
    """Apply one Adam update to every parameter, then zero the gradients."""
    missing = [name for name, param in store.items() if param.grad is None]
    if missing:
        raise UninitializedGradientError(f"no gradient for parameters {missing}")

    state.step += 1
    correction1 = 1.0 - state.beta1**state.step
    correction2 = 1.0 - state.beta2**state.step
    for name, param in store.items():
        grad = param.grad
        m = state.first_moment.get(name)
        v = state.second_moment.get(name)
        if m is None:
            m = np.zeros_like(param.values)
            v = np.zeros_like(param.values)
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad**2
        state.first_moment[name] = m
        state.second_moment[name] = v
        param.values = param.values - state.learning_rate * (m / correction1) / (
            np.sqrt(v / correction2) + state.eps
        )
    store.zero_grad()
