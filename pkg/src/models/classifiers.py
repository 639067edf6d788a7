"""
Word-image classifiers: a small CNN and a MobileNet-style depthwise stack
"""

from __future__ import annotations

import math

import numpy as np

from layers import (
    BatchNorm,
    Conv2D,
    Conv2DSpec,
    Dense,
    Dropout,
    GlobalAvgPool,
    Layer,
    MaxPool,
    SeparableConv2D,
)
from models.base import Activation
from models.spec import ModelSpec, Variant
from numerics import Graph, Tensor, relu

SIMPLE_CNN_CHANNELS = {Variant.FULL: (32, 64), Variant.SMALL: (16, 32)}
SIMPLE_CNN_HIDDEN = {Variant.FULL: 128, Variant.SMALL: 32}

# (pointwise output channels, depthwise stride) for the 13 separable blocks
MOBILENET_BLOCKS = (
    (64, 1), (128, 2), (128, 1), (256, 2), (256, 1), (512, 2),
    (512, 1), (512, 1), (512, 1), (512, 1), (512, 1), (1024, 2), (1024, 1),
)
MOBILENET_STEM = 32
SMALL_WIDTH_MULTIPLIER = 0.25


def build_simple_cnn(spec: ModelSpec, graph: Graph, rng: np.random.Generator) -> list[Layer]:
    c1, c2 = SIMPLE_CNN_CHANNELS[spec.variant]
    hidden = SIMPLE_CNN_HIDDEN[spec.variant]
    return [
        Conv2D("conv1", graph, Conv2DSpec(kernel_h=3, kernel_w=3, in_channels=1, out_channels=c1), rng),
        Activation("relu1", graph, "relu"),
        MaxPool("pool1", graph),
        Conv2D("conv2", graph, Conv2DSpec(kernel_h=3, kernel_w=3, in_channels=c1, out_channels=c2), rng),
        Activation("relu2", graph, "relu"),
        MaxPool("pool2", graph),
        GlobalAvgPool("gap", graph),
        Dense("dense1", graph, c2, hidden, rng),
        Activation("relu3", graph, "relu"),
        Dense("logits", graph, hidden, spec.output_classes, rng),
    ]


class SeparableBlock(Layer):
    """Depthwise 3×3 → BN → ReLU → pointwise 1×1 → BN → ReLU"""

    kind = "separable_block"

    def __init__(self, name: str, graph: Graph, spec: Conv2DSpec, rng: np.random.Generator) -> None:
        super().__init__(name, graph)
        self.conv = SeparableConv2D(f"{name}.sep", graph, spec, rng)
        self.depth_bn = BatchNorm(f"{name}.depth_bn", graph, spec.in_channels)
        self.point_bn = BatchNorm(f"{name}.point_bn", graph, spec.out_channels)
        self.sublayers = [self.conv, self.depth_bn, self.point_bn]

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        x = relu(self.depth_bn(self.conv.depthwise(x), training))
        return relu(self.point_bn(self.conv.pointwise(x), training))


def _scaled(channels: int, multiplier: float) -> int:
    return max(1, math.ceil(channels * multiplier))


def build_mobilenet_mini(spec: ModelSpec, graph: Graph, rng: np.random.Generator) -> list[Layer]:
    multiplier = spec.width_multiplier
    if spec.variant == Variant.SMALL:
        multiplier = min(multiplier, SMALL_WIDTH_MULTIPLIER)

    stem = _scaled(MOBILENET_STEM, multiplier)
    layers: list[Layer] = [
        Conv2D(
            "stem", graph,
            Conv2DSpec(kernel_h=3, kernel_w=3, in_channels=1, out_channels=stem, stride_h=2, stride_w=2),
            rng,
        ),
        BatchNorm("stem_bn", graph, stem),
        Activation("stem_relu", graph, "relu"),
    ]
    channels = stem
    for index, (out_channels, stride) in enumerate(MOBILENET_BLOCKS, start=1):
        scaled = _scaled(out_channels, multiplier)
        conv = Conv2DSpec(
            kernel_h=3, kernel_w=3, in_channels=channels, out_channels=scaled,
            stride_h=stride, stride_w=stride,
        )
        layers.append(SeparableBlock(f"block{index}", graph, conv, rng))
        channels = scaled
    layers.extend([
        GlobalAvgPool("gap", graph),
        Dropout("dropout", graph, 0.2),
        Dense("logits", graph, channels, spec.output_classes, rng),
    ])
    return layers
