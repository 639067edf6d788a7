"""
Differentiable tensor operations

Broadcasting is limited to scalar-with-tensor; everything else needs an
explicit ``reshape`` so each gradient rule stays easy to audit.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

import numpy as np

from errors import ShapeError
from numerics.tensor import Function, Tensor, as_tensor


def _check_same_or_scalar(a: np.ndarray, b: np.ndarray, op: str) -> None:
    if a.shape != b.shape and a.ndim != 0 and b.ndim != 0:
        msg = f"{op}: shapes {a.shape} and {b.shape} differ and neither is a scalar"
        raise ShapeError(msg)


def _reduce_to(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Undo scalar broadcasting in a gradient"""
    if grad.shape == shape:
        return grad
    return np.asarray(grad.sum()).reshape(shape)


class Add(Function):
    op_name = "add"

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_same_or_scalar(a, b, "add")
        self.saved["shapes"] = (a.shape, b.shape)
        return a + b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        sa, sb = self.saved["shapes"]
        return _reduce_to(grad, sa), _reduce_to(grad, sb)


class Mul(Function):
    op_name = "mul"

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_same_or_scalar(a, b, "mul")
        self.saved["a"], self.saved["b"] = a, b
        return a * b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.saved["a"], self.saved["b"]
        return _reduce_to(grad * b, a.shape), _reduce_to(grad * a, b.shape)


class MatMul(Function):
    op_name = "matmul"

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:  # noqa: PLR2004
            msg = f"matmul: cannot multiply {a.shape} by {b.shape}"
            raise ShapeError(msg)
        self.saved["a"], self.saved["b"] = a, b
        return a @ b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.saved["a"], self.saved["b"]
        return grad @ b.T, a.T @ grad


class AddBias(Function):
    """x[..., F] + b[F]: the one sanctioned row broadcast"""

    op_name = "add_bias"

    def forward(self, x: np.ndarray, b: np.ndarray) -> np.ndarray:
        if b.ndim != 1 or x.shape[-1] != b.shape[0]:
            msg = f"add_bias: bias {b.shape} does not match trailing axis of {x.shape}"
            raise ShapeError(msg)
        return x + b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return grad, grad.reshape(-1, grad.shape[-1]).sum(axis=0)


class Exp(Function):
    op_name = "exp"

    def forward(self, x: np.ndarray) -> np.ndarray:
        out = np.exp(x)
        self.saved["out"] = out
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad * self.saved["out"],)


class Log(Function):
    op_name = "log"

    def forward(self, x: np.ndarray) -> np.ndarray:
        self.saved["x"] = x
        return np.log(x)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad / self.saved["x"],)


class Sigmoid(Function):
    op_name = "sigmoid"

    def forward(self, x: np.ndarray) -> np.ndarray:
        out = stable_sigmoid(x)
        self.saved["out"] = out
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        out = self.saved["out"]
        return (grad * out * (1.0 - out),)


class Tanh(Function):
    op_name = "tanh"

    def forward(self, x: np.ndarray) -> np.ndarray:
        out = np.tanh(x)
        self.saved["out"] = out
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad * (1.0 - self.saved["out"] ** 2),)


class LeakyReLU(Function):
    op_name = "leaky_relu"

    def forward(self, x: np.ndarray, slope: float = 0.0) -> np.ndarray:
        mask = x > 0
        self.saved["mask"], self.saved["slope"] = mask, slope
        return np.where(mask, x, slope * x)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.where(self.saved["mask"], grad, self.saved["slope"] * grad),)


class Sum(Function):
    op_name = "sum"

    def forward(self, x: np.ndarray, axis: int | None = None) -> np.ndarray:
        self.saved["shape"], self.saved["axis"] = x.shape, axis
        return np.sum(x, axis=axis)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        shape, axis = self.saved["shape"], self.saved["axis"]
        if axis is not None:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, shape).copy(),)


class Reshape(Function):
    op_name = "reshape"

    def forward(self, x: np.ndarray, shape: tuple[int, ...] = ()) -> np.ndarray:
        self.saved["shape"] = x.shape
        try:
            return x.reshape(shape)
        except ValueError as err:
            msg = f"reshape: cannot view {x.shape} as {shape}"
            raise ShapeError(msg) from err

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad.reshape(self.saved["shape"]),)


class Transpose(Function):
    op_name = "transpose"

    def forward(self, x: np.ndarray, axes: tuple[int, ...] = ()) -> np.ndarray:
        axes = axes or tuple(reversed(range(x.ndim)))
        self.saved["axes"] = axes
        return np.ascontiguousarray(np.transpose(x, axes))

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.transpose(grad, np.argsort(self.saved["axes"])),)


class Reverse(Function):
    op_name = "reverse"

    def forward(self, x: np.ndarray, axis: int = 0) -> np.ndarray:
        self.saved["axis"] = axis
        return np.flip(x, axis=axis).copy()

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.flip(grad, axis=self.saved["axis"]).copy(),)


class Concat(Function):
    op_name = "concat"

    def forward(self, *arrays: np.ndarray, axis: int = -1) -> np.ndarray:
        self.saved["sizes"] = [a.shape[axis] for a in arrays]
        self.saved["axis"] = axis
        try:
            return np.concatenate(arrays, axis=axis)
        except ValueError as err:
            shapes = [a.shape for a in arrays]
            msg = f"concat: incompatible shapes {shapes} along axis {axis}"
            raise ShapeError(msg) from err

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, ...]:
        bounds = np.cumsum(self.saved["sizes"])[:-1]
        return tuple(np.split(grad, bounds, axis=self.saved["axis"]))


class SoftmaxRows(Function):
    op_name = "softmax"

    def forward(self, x: np.ndarray) -> np.ndarray:
        out = softmax_array(x)
        self.saved["out"] = out
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        out = self.saved["out"]
        return (out * (grad - np.sum(grad * out, axis=-1, keepdims=True)),)


class LogSoftmaxRows(Function):
    op_name = "log_softmax"

    def forward(self, x: np.ndarray) -> np.ndarray:
        out = log_softmax_array(x)
        self.saved["out"] = out
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        probs = np.exp(self.saved["out"])
        return (grad - probs * np.sum(grad, axis=-1, keepdims=True),)


def stable_sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function without overflow for large |x|"""
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def softmax_array(x: np.ndarray) -> np.ndarray:
    """Row-wise softmax over the last axis, stabilized by the row maximum"""
    shifted = x - np.max(x, axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / np.sum(ex, axis=-1, keepdims=True)


def log_softmax_array(x: np.ndarray) -> np.ndarray:
    shifted = x - np.max(x, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


# Functional API


def add(a: Tensor | float, b: Tensor | float) -> Tensor:
    return Add.apply(a, b)


def sub(a: Tensor | float, b: Tensor | float) -> Tensor:
    return Add.apply(a, Mul.apply(b, -1.0))


def mul(a: Tensor | float, b: Tensor | float) -> Tensor:
    return Mul.apply(a, b)


def scale(x: Tensor, factor: float) -> Tensor:
    return Mul.apply(x, float(factor))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """(m×k)·(k×n); gradients g·bᵀ and aᵀ·g"""
    return MatMul.apply(a, b)


def add_bias(x: Tensor, b: Tensor) -> Tensor:
    return AddBias.apply(x, b)


def exp(x: Tensor) -> Tensor:
    return Exp.apply(x)


def log(x: Tensor) -> Tensor:
    return Log.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def tanh(x: Tensor) -> Tensor:
    return Tanh.apply(x)


def relu(x: Tensor) -> Tensor:
    return LeakyReLU.apply(x, slope=0.0)


def leaky_relu(x: Tensor, slope: float = 0.01) -> Tensor:
    return LeakyReLU.apply(x, slope=slope)


def sum_all(x: Tensor, axis: int | None = None) -> Tensor:
    return Sum.apply(x, axis=axis)


def mean(x: Tensor) -> Tensor:
    return Mul.apply(Sum.apply(x), 1.0 / max(1, as_tensor(x).size))


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    return Reshape.apply(x, shape=tuple(shape))


def transpose(x: Tensor, axes: Sequence[int] = ()) -> Tensor:
    return Transpose.apply(x, axes=tuple(axes))


def reverse(x: Tensor, axis: int = 0) -> Tensor:
    return Reverse.apply(x, axis=axis)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    return Concat.apply(*tensors, axis=axis)


def softmax_rows(x: Tensor) -> Tensor:
    """Each row positive and summing to one; rows are the last axis"""
    return SoftmaxRows.apply(x)


def log_softmax_rows(x: Tensor) -> Tensor:
    return LogSoftmaxRows.apply(x)


def constant(data: Any) -> Tensor:
    return Tensor(data)
