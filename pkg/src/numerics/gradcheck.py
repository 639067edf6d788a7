"""
Central finite-difference gradient checking
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from numerics.tensor import Graph, Tensor, backward


def numerical_gradient(
    fn: Callable[[], Tensor], tensor: Tensor, h: float = 1e-5,
) -> np.ndarray:
    """d fn() / d tensor by central differences, perturbing in place"""
    grad = np.zeros_like(tensor.data)
    flat = tensor.data.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = fn().item()
        flat[i] = original - h
        minus = fn().item()
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-3) -> float:
    """Max elementwise |a - n| / max(|a|, |n|, floor)"""
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom)) if analytic.size else 0.0


def check_gradients(
    fn: Callable[[], Tensor], tensors: Sequence[Tensor], h: float = 1e-5,
) -> float:
    """Worst relative error between analytic and numeric gradients of ``fn``"""
    graph = Graph()
    for i, tensor in enumerate(tensors):
        tensor.grad = None
        graph.add_parameter(f"t{i}", tensor)
    backward(graph, fn())
    analytic = [t.grad.copy() for t in tensors]
    worst = 0.0
    for tensor, grad in zip(tensors, analytic, strict=True):
        numeric = numerical_gradient(fn, tensor, h)
        worst = max(worst, relative_error(grad, numeric))
    return worst
