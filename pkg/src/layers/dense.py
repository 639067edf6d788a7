"""
Fully connected layer over the trailing feature axis
"""

from __future__ import annotations

import numpy as np

from errors import ShapeError
from layers.base import Layer, glorot_uniform
from numerics import Graph, Tensor, add_bias, matmul, reshape


def dense(x: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """x[..., F] · W[F, O] + b[O]"""
    if x.shape[-1] != weights.shape[0]:
        msg = f"dense: input {x.shape} does not match weights {weights.shape}"
        raise ShapeError(msg)
    lead = x.shape[:-1]
    flat = reshape(x, (-1, x.shape[-1])) if x.ndim != 2 else x  # noqa: PLR2004
    out = add_bias(matmul(flat, weights), bias)
    return reshape(out, (*lead, weights.shape[1])) if x.ndim != 2 else out  # noqa: PLR2004


class Dense(Layer):
    kind = "dense"

    def __init__(self, name: str, graph: Graph, in_features: int, out_features: int, rng: np.random.Generator) -> None:
        super().__init__(name, graph)
        self.weight = self.add_param(
            "weight", glorot_uniform(rng, (in_features, out_features), in_features, out_features),
        )
        self.bias = self.add_param("bias", np.zeros(out_features))

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return dense(x, self.weight, self.bias)
