"""Dense double-precision tensors with reverse-mode differentiation.

Every primitive computes its forward value with NumPy and, when any operand
requires a gradient, records a closure mapping the upstream gradient onto one
gradient per operand. ``backward`` walks the recorded graph in reverse
topological order.
"""

from collections.abc import Callable, Sequence
from typing import Any

import numpy as np

from ..base import ConfigError, DimensionError, RankError

GradFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]


class Tensor:
    """An n-dimensional float64 array that can take part in differentiation."""

    values: np.ndarray
    requires_grad: bool
    grad: np.ndarray | None

    def __init__(
        self,
        values: Any,
        *,
        requires_grad: bool = False,
        parents: tuple["Tensor", ...] = (),
        grad_fn: GradFn | None = None,
        op: str = "leaf",
    ):
        self.values = np.asarray(values, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad = None
        self._parents = parents
        self._grad_fn = grad_fn
        self.op = op

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def is_leaf(self) -> bool:
        return self._grad_fn is None

    def item(self) -> float:
        return float(self.values.reshape(-1)[0]) if self.values.size == 1 else float("nan")

    def numpy(self) -> np.ndarray:
        return self.values

    def zero_grad(self):
        self.grad = np.zeros_like(self.values)

    def backward(self):
        backward(self)

    def __repr__(self):
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return index(self, key)


def as_tensor(value: Any) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _result(values: np.ndarray, parents: tuple[Tensor, ...], grad_fn: GradFn, op: str) -> Tensor:
    if any(parent.requires_grad for parent in parents):
        return Tensor(values, requires_grad=True, parents=parents, grad_fn=grad_fn, op=op)
    return Tensor(values, op=op)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` over the axes NumPy broadcasting expanded to reach its shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(operation: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(operation, a.shape, b.shape) from None


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)
    return _result(
        a.values + b.values,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
        "add",
    )


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)
    return _result(
        a.values - b.values,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
        "sub",
    )


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)
    return _result(
        a.values * b.values,
        (a, b),
        lambda g: (_unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)),
        "mul",
    )


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("div", a, b)
    out = a.values / b.values
    return _result(
        out,
        (a, b),
        lambda g: (_unbroadcast(g / b.values, a.shape), _unbroadcast(-g * out / b.values, b.shape)),
        "div",
    )


def neg(a) -> Tensor:
    a = as_tensor(a)
    return _result(-a.values, (a,), lambda g: (-g,), "neg")


def scale(a, factor: float) -> Tensor:
    a = as_tensor(a)
    return _result(a.values * factor, (a,), lambda g: (g * factor,), "scale")


def matmul(a, b) -> Tensor:
    """Matrix product with NumPy semantics (1-D operands are promoted and squeezed)."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim == 0 or b.ndim == 0:
        raise DimensionError("matmul", a.shape, b.shape)
    left = a.values if a.ndim > 1 else a.values[None, :]
    right = b.values if b.ndim > 1 else b.values[:, None]
    if left.shape[-1] != right.shape[-2]:
        raise DimensionError("matmul", a.shape, b.shape)
    try:
        full = np.matmul(left, right)
    except ValueError:
        raise DimensionError("matmul", a.shape, b.shape) from None
    out = full
    if a.ndim == 1:
        out = out[..., 0, :]
    if b.ndim == 1:
        out = out[..., 0]

    def grad_fn(g):
        g_full = g.reshape(full.shape)
        grad_left = _unbroadcast(g_full @ np.swapaxes(right, -1, -2), left.shape)
        grad_right = _unbroadcast(np.swapaxes(left, -1, -2) @ g_full, right.shape)
        return grad_left.reshape(a.shape), grad_right.reshape(b.shape)

    return _result(out, (a, b), grad_fn, "matmul")


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    tensors = tuple(as_tensor(t) for t in tensors)
    try:
        out = np.concatenate([t.values for t in tensors], axis=axis)
    except ValueError:
        raise DimensionError("concat", *(t.shape for t in tensors)) from None
    sizes = np.cumsum([t.shape[axis] for t in tensors])[:-1]
    return _result(out, tensors, lambda g: tuple(np.split(g, sizes, axis=axis)), "concat")


def relu(a) -> Tensor:
    a = as_tensor(a)
    active = a.values > 0
    return _result(np.where(active, a.values, 0.0), (a,), lambda g: (g * active,), "relu")


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.values)
    return _result(out, (a,), lambda g: (g * out,), "exp")


def log(a) -> Tensor:
    a = as_tensor(a)
    return _result(np.log(a.values), (a,), lambda g: (g / a.values,), "log")


def clamp(a, low: float | None = None, high: float | None = None) -> Tensor:
    """Clip values into ``[low, high]``; clipped entries pass no gradient."""
    a = as_tensor(a)
    out = np.clip(a.values, low, high)
    inside = np.ones(a.shape, dtype=bool)
    if low is not None:
        inside &= a.values > low
    if high is not None:
        inside &= a.values < high
    return _result(out, (a,), lambda g: (g * inside,), "clamp")


def softmax(a, axis: int = -1) -> Tensor:
    a = as_tensor(a)
    shifted = np.exp(a.values - a.values.max(axis=axis, keepdims=True))
    out = shifted / shifted.sum(axis=axis, keepdims=True)
    return _result(
        out,
        (a,),
        lambda g: (out * (g - (g * out).sum(axis=axis, keepdims=True)),),
        "softmax",
    )


def sum(a, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    a = as_tensor(a)
    out = a.values.sum(axis=axis, keepdims=keepdims)

    def grad_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _result(np.asarray(out), (a,), grad_fn, "sum")


def row_sum(a) -> Tensor:
    return sum(a, axis=-1)


def mean(a, axis: int | None = None) -> Tensor:
    a = as_tensor(a)
    count = a.values.size if axis is None else a.shape[axis]
    return scale(sum(a, axis=axis), 1.0 / count)


def l2_norm(a, axis: int = -1, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    norm = np.sqrt((a.values**2).sum(axis=axis, keepdims=True))

    def grad_fn(g):
        if not keepdims:
            g = np.expand_dims(g, axis)
        safe = np.where(norm > 0, norm, 1.0)
        return (np.where(norm > 0, g * a.values / safe, 0.0),)

    out = norm if keepdims else np.squeeze(norm, axis=axis)
    return _result(out, (a,), grad_fn, "l2_norm")


def cosine(a, b, axis: int = -1, eps: float = 1e-12) -> Tensor:
    """Cosine similarity along ``axis``; zero vectors give similarity 0 and no gradient."""
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise DimensionError("cosine", a.shape, b.shape)
    dot = (a.values * b.values).sum(axis=axis, keepdims=True)
    norm_a = np.sqrt((a.values**2).sum(axis=axis, keepdims=True))
    norm_b = np.sqrt((b.values**2).sum(axis=axis, keepdims=True))
    denom = norm_a * norm_b
    valid = denom > eps
    safe = np.where(valid, denom, 1.0)
    sim = np.where(valid, dot / safe, 0.0)

    def grad_fn(g):
        g = np.expand_dims(g, axis)
        safe_a = np.where(norm_a > 0, norm_a, 1.0)
        safe_b = np.where(norm_b > 0, norm_b, 1.0)
        grad_a = np.where(valid, g * (b.values / safe - sim * a.values / safe_a**2), 0.0)
        grad_b = np.where(valid, g * (a.values / safe - sim * b.values / safe_b**2), 0.0)
        return grad_a, grad_b

    return _result(np.squeeze(sim, axis=axis), (a, b), grad_fn, "cosine")


def reshape(a, shape: tuple[int, ...]) -> Tensor:
    a = as_tensor(a)
    try:
        out = a.values.reshape(shape)
    except ValueError:
        raise DimensionError("reshape", a.shape, tuple(shape)) from None
    return _result(out, (a,), lambda g: (g.reshape(a.shape),), "reshape")


def swapaxes(a, axis1: int, axis2: int) -> Tensor:
    a = as_tensor(a)
    return _result(
        np.swapaxes(a.values, axis1, axis2),
        (a,),
        lambda g: (np.swapaxes(g, axis1, axis2),),
        "swapaxes",
    )


def _is_basic_index(key) -> bool:
    parts = key if isinstance(key, tuple) else (key,)
    return all(isinstance(part, (int, slice, type(Ellipsis), type(None))) for part in parts)


def index(a, key) -> Tensor:
    a = as_tensor(a)
    out = a.values[key]

    def grad_fn(g):
        grad = np.zeros_like(a.values)
        if _is_basic_index(key):
            grad[key] += g
        else:
            np.add.at(grad, key, g)
        return (grad,)

    return _result(np.array(out, copy=True), (a,), grad_fn, "index")


def take(a, rows: np.ndarray) -> Tensor:
    """Gather rows (axis 0) of ``a``; repeated rows accumulate their gradients."""
    a = as_tensor(a)
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size and (rows.min() < 0 or rows.max() >= a.shape[0]):
        raise DimensionError("take", a.shape, rows.shape)

    def grad_fn(g):
        grad = np.zeros_like(a.values)
        np.add.at(grad, rows, g)
        return (grad,)

    return _result(a.values[rows], (a,), grad_fn, "take")


def segment_sum(a, segments: np.ndarray, num_segments: int) -> Tensor:
    """Sum rows of ``a`` into ``num_segments`` buckets given by ``segments``."""
    a = as_tensor(a)
    segments = np.asarray(segments, dtype=np.int64)
    if segments.shape[0] != a.shape[0]:
        raise DimensionError("segment_sum", a.shape, segments.shape)
    out = np.zeros((num_segments, *a.shape[1:]), dtype=np.float64)
    np.add.at(out, segments, a.values)
    return _result(out, (a,), lambda g: (g[segments],), "segment_sum")


def where(mask: np.ndarray, a, b) -> Tensor:
    """Select ``a`` where the constant ``mask`` holds and ``b`` elsewhere."""
    a, b = as_tensor(a), as_tensor(b)
    mask = np.asarray(mask, dtype=bool)
    out = np.where(mask, a.values, b.values)
    return _result(
        out,
        (a, b),
        lambda g: (
            _unbroadcast(np.where(mask, g, 0.0), a.shape),
            _unbroadcast(np.where(mask, 0.0, g), b.shape),
        ),
        "where",
    )


def dropout(a, rate: float, rng: np.random.Generator, training: bool = True) -> Tensor:
    """Inverted dropout: surviving entries are scaled by ``1 / (1 - rate)``."""
    a = as_tensor(a)
    if not 0 <= rate < 1:
        raise ConfigError(f"dropout rate must lie in [0, 1), got {rate}")
    if not training or rate == 0:
        return a
    keep = (rng.random(a.shape) >= rate) / (1.0 - rate)
    return _result(a.values * keep, (a,), lambda g: (g * keep,), "dropout")


def _topological_order(output: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(output, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(output: Tensor):
    """Accumulate d(output)/d(leaf) into ``grad`` of every leaf that requires it."""
    if output.values.size != 1:
        raise RankError(f"backward needs a scalar output, got shape {output.shape}")
    if not output.requires_grad:
        return
    grads: dict[int, np.ndarray] = {id(output): np.ones_like(output.values)}
    for node in reversed(_topological_order(output)):
        upstream = grads.pop(id(node), None)
        if upstream is None:
            continue
        if node.is_leaf:
            node.grad = upstream.copy() if node.grad is None else node.grad + upstream
            continue
        for parent, grad in zip(node._parents, node._grad_fn(upstream)):
            if grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            grads[key] = grads[key] + grad if key in grads else grad
