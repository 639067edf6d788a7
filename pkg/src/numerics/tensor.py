"""
Dense float64 tensors with reverse-mode automatic differentiation

Every differentiable operation is a ``Function`` subclass. Calling
``SomeFunction.apply(*tensors)`` runs the numpy forward pass and, when any
input requires a gradient, records the op so ``backward`` can replay it in
reverse topological order.

Shape conventions: sequences are (time, features), images are
(height, width, channels), optionally with a leading batch axis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np

from errors import ContractError

logger = logging.getLogger(__name__)

DTYPE = np.float64


class Tensor:
    """Row-major float64 array with an optional gradient slot"""

    __slots__ = ("_ctx", "data", "grad", "name", "requires_grad")

    def __init__(
        self,
        data: Any,
        requires_grad: bool = False,
        name: str | None = None,
        _ctx: Function | None = None,
    ) -> None:
        self.data = np.array(data, dtype=DTYPE) if not _is_f64(data) else data
        self.requires_grad = requires_grad
        self.name = name
        self.grad: np.ndarray | None = None
        self._ctx = _ctx

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self._ctx is None

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            msg = f"item() needs a single-element tensor, got shape {self.shape}"
            raise ContractError(msg)
        return float(self.data.reshape(()))

    def detach(self) -> Tensor:
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Backpropagate from this scalar into every reachable leaf"""
        backward(Graph(), self)

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # Operator sugar; implementations live in numerics.ops
    def __add__(self, other: Tensor | float) -> Tensor:
        from numerics import ops

        return ops.add(self, other)

    def __radd__(self, other: float) -> Tensor:
        from numerics import ops

        return ops.add(other, self)

    def __sub__(self, other: Tensor | float) -> Tensor:
        from numerics import ops

        return ops.sub(self, other)

    def __rsub__(self, other: float) -> Tensor:
        from numerics import ops

        return ops.sub(other, self)

    def __mul__(self, other: Tensor | float) -> Tensor:
        from numerics import ops

        return ops.mul(self, other)

    def __rmul__(self, other: float) -> Tensor:
        from numerics import ops

        return ops.mul(other, self)

    def __neg__(self) -> Tensor:
        from numerics import ops

        return ops.mul(self, -1.0)

    def __matmul__(self, other: Tensor) -> Tensor:
        from numerics import ops

        return ops.matmul(self, other)


def _is_f64(data: Any) -> bool:
    return isinstance(data, np.ndarray) and data.dtype == DTYPE


def as_tensor(value: Tensor | float | np.ndarray) -> Tensor:
    """Wrap plain numbers and arrays as constant tensors"""
    return value if isinstance(value, Tensor) else Tensor(value)


class Function:
    """A recorded operation: its inputs, saved state and gradient rule"""

    op_name: ClassVar[str] = "op"

    def __init__(self, *parents: Tensor) -> None:
        self.parents = parents
        self.saved: dict[str, Any] = {}

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        """Return one gradient (or None) per parent"""
        raise NotImplementedError

    @classmethod
    def apply(cls, *inputs: Tensor | float | np.ndarray, **kwargs: Any) -> Tensor:
        parents = tuple(as_tensor(x) for x in inputs)
        ctx = cls(*parents)
        out = ctx.forward(*(p.data for p in parents), **kwargs)
        requires_grad = any(p.requires_grad for p in parents)
        return Tensor(
            np.asarray(out, dtype=DTYPE),
            requires_grad=requires_grad,
            _ctx=ctx if requires_grad else None,
        )


@dataclass(frozen=True)
class Node:
    """One entry of a topologically ordered graph"""

    node_id: int
    op: str
    inputs: tuple[int, ...]
    output: Tensor


class Graph:
    """Named trainable leaves plus the op records reachable from a loss"""

    def __init__(self) -> None:
        self.parameters: dict[str, Tensor] = {}

    def parameter(self, name: str, data: Any) -> Tensor:
        """Create and register a trainable leaf"""
        tensor = Tensor(data, requires_grad=True, name=name)
        self.add_parameter(name, tensor)
        return tensor

    def add_parameter(self, name: str, tensor: Tensor) -> None:
        if name in self.parameters:
            msg = f"Parameter {name!r} registered twice"
            raise ContractError(msg)
        tensor.requires_grad = True
        tensor.name = name
        self.parameters[name] = tensor

    def zero_grad(self) -> None:
        for tensor in self.parameters.values():
            tensor.grad = None

    def nodes(self, loss: Tensor) -> list[Node]:
        """Op records reachable from ``loss``; inputs always precede consumers"""
        order = _topological_order(loss)
        ids = {id(t): i for i, t in enumerate(order)}
        result = []
        for i, tensor in enumerate(order):
            ctx = tensor._ctx  # noqa: SLF001
            op = ctx.op_name if ctx is not None else "leaf"
            inputs = tuple(ids[id(p)] for p in ctx.parents if id(p) in ids) if ctx else ()
            result.append(Node(i, op, inputs, tensor))
        return result


def _topological_order(root: Tensor) -> list[Tensor]:
    """Iterative post-order DFS over tensors that carry gradients"""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        tensor, expanded = stack.pop()
        if expanded:
            order.append(tensor)
            continue
        if id(tensor) in visited:
            continue
        visited.add(id(tensor))
        stack.append((tensor, True))
        ctx = tensor._ctx  # noqa: SLF001
        if ctx is not None:
            for parent in reversed(ctx.parents):
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
    return order


def backward(graph: Graph, loss: Tensor) -> dict[str, np.ndarray]:
    """Populate ``.grad`` of every parameter and return them by name

    Parameters not reachable from ``loss`` receive zero gradients of their
    own shape.
    """
    if loss.size != 1:
        msg = f"backward() needs a scalar loss, got shape {loss.shape}"
        raise ContractError(msg)

    grads: dict[int, np.ndarray] = {}
    if loss.requires_grad:
        grads[id(loss)] = np.ones_like(loss.data)
        for tensor in reversed(_topological_order(loss)):
            grad = grads.get(id(tensor))
            ctx = tensor._ctx  # noqa: SLF001
            if grad is None:
                continue
            if ctx is None:
                tensor.grad = grad if tensor.grad is None else tensor.grad + grad
                continue
            parent_grads = ctx.backward(grad)
            for parent, parent_grad in zip(ctx.parents, parent_grads, strict=True):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + parent_grad
                else:
                    grads[key] = parent_grad
            # Free intermediate gradients as soon as they are consumed
            del grads[id(tensor)]

    result: dict[str, np.ndarray] = {}
    for name, param in graph.parameters.items():
        if param.grad is None:
            param.grad = np.zeros_like(param.data)
        result[name] = param.grad
    return result
