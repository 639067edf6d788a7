"""
Line recognisers: SimpleHTR, Bluche and Puigcerver

Each builder returns the ordered layer list for a 32-pixel-high input.
Convolution output is turned into a left-to-right sequence by ToSequence,
run through bidirectional LSTMs and projected to charset + blank per step.
"""

from __future__ import annotations

import numpy as np

from layers import BatchNorm, BiLSTM, Conv2D, Conv2DSpec, Dense, Dropout, GatedConv2D, Layer, MaxPool
from models.base import Activation, ToSequence
from models.spec import ModelSpec, Variant
from numerics import Graph

# (kernel, channels, (pool_h, pool_w)) per stage; five stages pool 32 rows to 1
SIMPLE_HTR_STAGES = {
    Variant.FULL: ((5, 32, (2, 2)), (5, 64, (2, 2)), (3, 128, (2, 1)), (3, 128, (2, 1)), (3, 256, (2, 1))),
    Variant.SMALL: ((5, 16, (2, 2)), (5, 32, (2, 2)), (3, 48, (2, 1)), (3, 64, (2, 1)), (3, 64, (2, 1))),
}
SIMPLE_HTR_HIDDEN = {Variant.FULL: 256, Variant.SMALL: 64}

BLUCHE_CHANNELS = {
    Variant.FULL: (8, 16, 32, 64, 128),
    Variant.SMALL: (8, 16, 24, 32, 64),
}
BLUCHE_HIDDEN = {Variant.FULL: 128, Variant.SMALL: 64}

PUIGCERVER_BLOCKS = 5
PUIGCERVER_POOLED_BLOCKS = 3
PUIGCERVER_FILTER_STEP = {Variant.FULL: 16, Variant.SMALL: 8}
PUIGCERVER_HIDDEN = {Variant.FULL: 256, Variant.SMALL: 64}
PUIGCERVER_RECURRENT_LAYERS = 5


def _conv(name: str, graph: Graph, rng: np.random.Generator, cin: int, cout: int, kh: int, kw: int | None = None, stride: tuple[int, int] = (1, 1)) -> Conv2D:
    spec = Conv2DSpec(
        kernel_h=kh, kernel_w=kw or kh, in_channels=cin, out_channels=cout,
        stride_h=stride[0], stride_w=stride[1],
    )
    return Conv2D(name, graph, spec, rng)


def build_simple_htr(spec: ModelSpec, graph: Graph, rng: np.random.Generator) -> list[Layer]:
    """Five conv/BN/ReLU/pool stages, two BLSTM layers, per-step projection"""
    layers: list[Layer] = []
    channels = 1
    height = spec.input_h
    for index, (kernel, out_channels, (pool_h, pool_w)) in enumerate(SIMPLE_HTR_STAGES[spec.variant], start=1):
        layers.extend([
            _conv(f"conv{index}", graph, rng, channels, out_channels, kernel),
            BatchNorm(f"bn{index}", graph, out_channels),
            Activation(f"relu{index}", graph, "relu"),
            MaxPool(f"pool{index}", graph, pool_h, pool_w),
        ])
        channels = out_channels
        height //= pool_h

    hidden = SIMPLE_HTR_HIDDEN[spec.variant]
    features = height * channels
    layers.append(ToSequence("sequence", graph))
    layers.append(BiLSTM("blstm1", graph, features, hidden, rng))
    layers.append(BiLSTM("blstm2", graph, 2 * hidden, hidden, rng))
    # 1×1 convolution over time is a dense layer applied at every step
    layers.append(Dense("projection", graph, 2 * hidden, spec.output_classes, rng))
    return layers


def build_bluche(spec: ModelSpec, graph: Graph, rng: np.random.Generator) -> list[Layer]:
    """Gated convolutional encoder followed by BLSTM / dense / BLSTM / dense

    The two 2×4 convolutions use a 4-high, 2-wide kernel with matching
    stride, shrinking height by 16 and width by 4 overall.
    """
    c1, c2, c3, c4, c5 = BLUCHE_CHANNELS[spec.variant]

    def gated(name: str, channels: int) -> GatedConv2D:
        conv = Conv2DSpec(kernel_h=3, kernel_w=3, in_channels=channels, out_channels=channels)
        return GatedConv2D(name, graph, conv, rng)

    layers: list[Layer] = [
        _conv("conv1", graph, rng, 1, c1, 3),
        Activation("tanh1", graph, "tanh"),
        _conv("conv2", graph, rng, c1, c2, 4, 2, stride=(4, 2)),
        Activation("tanh2", graph, "tanh"),
        gated("gated1", c2),
        _conv("conv3", graph, rng, c2, c3, 3),
        Activation("tanh3", graph, "tanh"),
        gated("gated2", c3),
        _conv("conv4", graph, rng, c3, c4, 4, 2, stride=(4, 2)),
        Activation("tanh4", graph, "tanh"),
        _conv("conv5", graph, rng, c4, c5, 3),
        Activation("tanh5", graph, "tanh"),
    ]
    hidden = BLUCHE_HIDDEN[spec.variant]
    features = (spec.input_h // 16) * c5
    layers.extend([
        ToSequence("sequence", graph),
        BiLSTM("blstm1", graph, features, hidden, rng),
        Dense("dense1", graph, 2 * hidden, hidden, rng),
        Activation("tanh6", graph, "tanh"),
        BiLSTM("blstm2", graph, hidden, hidden, rng),
        Dense("projection", graph, 2 * hidden, spec.output_classes, rng),
    ])
    return layers


def puigcerver_filters(variant: Variant = Variant.FULL) -> list[int]:
    """Filters of the n-th conv block grow linearly: step × n"""
    step = PUIGCERVER_FILTER_STEP[variant]
    return [step * n for n in range(1, PUIGCERVER_BLOCKS + 1)]


def build_puigcerver(spec: ModelSpec, graph: Graph, rng: np.random.Generator) -> list[Layer]:
    """Conv/BN/LeakyReLU blocks (pooled in the first three), five BLSTMs, linear"""
    layers: list[Layer] = []
    channels = 1
    height = spec.input_h
    for index, filters in enumerate(puigcerver_filters(spec.variant), start=1):
        if index > 2:  # noqa: PLR2004
            layers.append(Dropout(f"conv_dropout{index}", graph, 0.2))
        layers.extend([
            _conv(f"conv{index}", graph, rng, channels, filters, 3),
            BatchNorm(f"bn{index}", graph, filters),
            Activation(f"lrelu{index}", graph, "leaky_relu", slope=0.01),
        ])
        if index <= PUIGCERVER_POOLED_BLOCKS:
            layers.append(MaxPool(f"pool{index}", graph, 2, 2))
            height //= 2
        channels = filters

    hidden = PUIGCERVER_HIDDEN[spec.variant]
    layers.append(ToSequence("sequence", graph))
    features = height * channels
    for index in range(1, PUIGCERVER_RECURRENT_LAYERS + 1):
        layers.append(Dropout(f"rnn_dropout{index}", graph, 0.5))
        layers.append(BiLSTM(f"blstm{index}", graph, features, hidden, rng))
        features = 2 * hidden
    layers.append(Dropout("out_dropout", graph, 0.5))
    layers.append(Dense("projection", graph, features, spec.output_classes, rng))
    return layers
