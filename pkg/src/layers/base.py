"""
Layer base class and parameter initialisation
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from typing import Any

import numpy as np

from numerics import Graph, Tensor


def glorot_uniform(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int,
) -> np.ndarray:
    """Uniform in ±sqrt(6 / (fan_in + fan_out))"""
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    """A named block owning parameters registered in a shared Graph"""

    kind = "layer"

    def __init__(self, name: str, graph: Graph) -> None:
        self.name = name
        self.graph = graph
        self.params: dict[str, Tensor] = {}
        self.buffers: dict[str, np.ndarray] = {}
        self.sublayers: list[Layer] = []

    def add_param(self, key: str, data: np.ndarray) -> Tensor:
        tensor = self.graph.parameter(f"{self.name}.{key}", data)
        self.params[key] = tensor
        return tensor

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        raise NotImplementedError

    def walk(self) -> Iterator[Layer]:
        """This layer and every nested sublayer, depth first"""
        yield self
        for sub in self.sublayers:
            yield from sub.walk()

    def describe(self) -> dict[str, Any]:
        return {"name": self.name, "kind": self.kind}
