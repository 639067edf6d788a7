"""
Model container and inference entry points

A Model is an ordered stack of layers whose parameters live in one Graph.
Input batches are N×H×W×1 (paper-white = 1, already normalized); HTR kinds
emit N×T×(C+1) logits, classifiers N×K logits.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from ctc import ProbMatrix
from errors import ContractError, ShapeError
from imaging import GrayImage
from layers import Layer
from numerics import Graph, Tensor, leaky_relu, relu, reshape, softmax_array, tanh, transpose
from models.spec import ModelSpec

logger = logging.getLogger(__name__)


class Activation(Layer):
    """Parameter-free elementwise non-linearity"""

    kind = "activation"
    FUNCTIONS = ("relu", "tanh", "leaky_relu")

    def __init__(self, name: str, graph: Graph, function: str, slope: float = 0.01) -> None:
        super().__init__(name, graph)
        if function not in self.FUNCTIONS:
            msg = f"Unknown activation {function!r}; expected one of {', '.join(self.FUNCTIONS)}"
            raise ContractError(msg)
        self.function = function
        self.slope = slope

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        if self.function == "relu":
            return relu(x)
        if self.function == "tanh":
            return tanh(x)
        return leaky_relu(x, self.slope)


class ToSequence(Layer):
    """N×H×W×C feature map → N×W×(H·C) sequence, one time step per column"""

    kind = "to_sequence"

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        if x.ndim != 4:  # noqa: PLR2004
            msg = f"to_sequence expects N×H×W×C, got {x.shape}"
            raise ShapeError(msg)
        n, h, w, c = x.shape
        return reshape(transpose(x, (0, 2, 1, 3)), (n, w, h * c))


class ShapeRow(NamedTuple):
    name: str
    kind: str
    output_shape: tuple[int, ...]


class Model:
    def __init__(self, spec: ModelSpec, graph: Graph, layers: list[Layer]) -> None:
        self.spec = spec
        self.graph = graph
        self.layers = layers

    def __repr__(self) -> str:
        return f"Model(kind={self.spec.kind.value}, variant={self.spec.variant.value}, layers={len(self.layers)})"

    @property
    def parameters(self) -> dict[str, Tensor]:
        return self.graph.parameters

    def buffers(self) -> dict[str, np.ndarray]:
        """Non-trainable state (batch-norm running statistics) by qualified name"""
        result: dict[str, np.ndarray] = {}
        for layer in self.layers:
            for sub in layer.walk():
                for key, value in sub.buffers.items():
                    result[f"{sub.name}.{key}"] = value
        return result

    def load_buffers(self, values: dict[str, np.ndarray]) -> None:
        for layer in self.layers:
            for sub in layer.walk():
                for key in sub.buffers:
                    name = f"{sub.name}.{key}"
                    if name in values:
                        sub.buffers[key] = np.array(values[name], dtype=np.float64)

    def forward(
        self,
        x: Tensor | np.ndarray,
        training: bool = False,
        rng: np.random.Generator | None = None,
        trace: list[ShapeRow] | None = None,
    ) -> Tensor:
        """Logits for a batch shaped N×H×W×1 (or N×H×W)"""
        if not isinstance(x, Tensor):
            x = Tensor(x)
        if x.ndim == 3:  # noqa: PLR2004
            x = reshape(x, (*x.shape, 1))
        expected = (self.spec.input_h, self.spec.input_w, 1)
        if x.ndim != 4 or x.shape[1:] != expected:  # noqa: PLR2004
            msg = f"{self.spec.kind.value} expects input N×{expected[0]}×{expected[1]}×1, got {x.shape}"
            raise ShapeError(msg)
        for layer in self.layers:
            x = layer(x, training=training, rng=rng)
            if trace is not None:
                trace.append(ShapeRow(layer.name, layer.kind, x.shape))
        return x

    def predict(self, batch: np.ndarray) -> np.ndarray:
        """Inference probabilities: N×T×(C+1) for HTR kinds, N×K for classifiers"""
        logits = self.forward(batch).data
        return softmax_array(logits)


def _pixels(img: GrayImage | np.ndarray) -> np.ndarray:
    return img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)


def forward_htr(model: Model, img: GrayImage | np.ndarray) -> ProbMatrix:
    """Per-frame class probabilities for one normalized image"""
    if not model.spec.kind.is_htr:
        msg = f"forward_htr needs an HTR model, got {model.spec.kind.value}"
        raise ContractError(msg)
    pixels = _pixels(img)
    if pixels.shape != (model.spec.input_h, model.spec.input_w):
        msg = (
            f"image {pixels.shape[1]}×{pixels.shape[0]} (w×h) does not match model input "
            f"{model.spec.input_w}×{model.spec.input_h}"
        )
        raise ShapeError(msg)
    return ProbMatrix(model.predict(pixels[None])[0])


def forward_classifier(model: Model, img: GrayImage | np.ndarray) -> np.ndarray:
    """Class probability vector for one image"""
    if model.spec.kind.is_htr:
        msg = f"forward_classifier needs a classifier, got {model.spec.kind.value}"
        raise ContractError(msg)
    pixels = _pixels(img)
    if pixels.shape != (model.spec.input_h, model.spec.input_w):
        msg = (
            f"image {pixels.shape[1]}×{pixels.shape[0]} (w×h) does not match model input "
            f"{model.spec.input_w}×{model.spec.input_h}"
        )
        raise ShapeError(msg)
    return model.predict(pixels[None])[0]


def shape_table(model: Model) -> list[ShapeRow]:
    """Output shape of every top-level layer for a single blank input"""
    trace: list[ShapeRow] = []
    model.forward(np.ones((1, model.spec.input_h, model.spec.input_w, 1)), trace=trace)
    return trace


def parameter_count(model: Model) -> int:
    return int(sum(param.size for param in model.parameters.values()))
