"""
Layers

Functional ops and parameter-owning layer objects for the model zoo.
"""

from .base import Layer, glorot_uniform
from .conv import (
    Conv2D,
    Conv2DSpec,
    GatedConv2D,
    Padding,
    SeparableConv2D,
    conv2d,
    depthwise_conv2d,
    depthwise_separable_conv,
    gated_conv2d,
    pointwise_spec,
)
from .dense import Dense, dense
from .norm import BatchNorm, Dropout, batchnorm, dropout
from .pooling import GlobalAvgPool, MaxPool, avgpool_global, maxpool, maxpool2x2
from .recurrent import LSTM, BiLSTM, Direction, LSTMParams, LSTMSpec, lstm_forward

__all__ = [
    "LSTM",
    "BatchNorm",
    "BiLSTM",
    "Conv2D",
    "Conv2DSpec",
    "Dense",
    "Direction",
    "Dropout",
    "GatedConv2D",
    "GlobalAvgPool",
    "LSTMParams",
    "LSTMSpec",
    "Layer",
    "MaxPool",
    "Padding",
    "SeparableConv2D",
    "avgpool_global",
    "batchnorm",
    "conv2d",
    "dense",
    "depthwise_conv2d",
    "depthwise_separable_conv",
    "dropout",
    "gated_conv2d",
    "glorot_uniform",
    "lstm_forward",
    "maxpool",
    "maxpool2x2",
    "pointwise_spec",
]
