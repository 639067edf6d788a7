"""
Convolutions: plain, gated and depthwise-separable

All kernels are cross-correlations (no flip). Inputs are H×W×C or N×H×W×C;
weights are (kernel_h, kernel_w, in_channels, out_channels).
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import ShapeError
from layers.base import Layer, glorot_uniform
from numerics import Function, Graph, Tensor, mul, reshape, sigmoid


class Padding(str, Enum):
    SAME = "same"
    VALID = "valid"


class Conv2DSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kernel_h: int = Field(gt=0)
    kernel_w: int = Field(gt=0)
    in_channels: int = Field(gt=0)
    out_channels: int = Field(gt=0)
    stride_h: int = Field(default=1, gt=0)
    stride_w: int = Field(default=1, gt=0)
    padding: Padding = Padding.SAME

    @property
    def weight_shape(self) -> tuple[int, int, int, int]:
        return (self.kernel_h, self.kernel_w, self.in_channels, self.out_channels)

    def output_hw(self, height: int, width: int) -> tuple[int, int]:
        return (
            _out_len(height, self.kernel_h, self.stride_h, self.padding),
            _out_len(width, self.kernel_w, self.stride_w, self.padding),
        )


def _out_len(size: int, kernel: int, stride: int, padding: Padding) -> int:
    if padding == Padding.SAME:
        return math.ceil(size / stride)
    return max(0, (size - kernel) // stride + 1)


def _pads(size: int, kernel: int, stride: int, padding: Padding) -> tuple[int, int]:
    if padding == Padding.VALID:
        return 0, 0
    out = math.ceil(size / stride)
    total = max((out - 1) * stride + kernel - size, 0)
    return total // 2, total - total // 2


def _pad_input(x: np.ndarray, spec: Conv2DSpec) -> tuple[np.ndarray, int, int]:
    _, h, w, _ = x.shape
    ho, wo = spec.output_hw(h, w)
    pt, pb = _pads(h, spec.kernel_h, spec.stride_h, spec.padding)
    pl, pr = _pads(w, spec.kernel_w, spec.stride_w, spec.padding)
    xp = np.pad(x, ((0, 0), (pt, pb), (pl, pr), (0, 0))) if pt + pb + pl + pr else x
    return xp, ho, wo


def _window(xp: np.ndarray, i: int, j: int, spec: Conv2DSpec, ho: int, wo: int) -> np.ndarray:
    return xp[
        :,
        i : i + spec.stride_h * (ho - 1) + 1 : spec.stride_h,
        j : j + spec.stride_w * (wo - 1) + 1 : spec.stride_w,
        :,
    ]


class Conv2DOp(Function):
    """Sum over kernel taps of shifted-input × tap-matrix products"""

    op_name = "conv2d"

    def forward(
        self, x: np.ndarray, w: np.ndarray, b: np.ndarray, spec: Conv2DSpec | None = None,
    ) -> np.ndarray:
        n, _, _, cin = x.shape
        if cin != spec.in_channels or w.shape != spec.weight_shape:
            msg = (
                f"conv2d: input {x.shape} / weights {w.shape} do not match "
                f"spec weights {spec.weight_shape}"
            )
            raise ShapeError(msg)
        xp, ho, wo = _pad_input(x, spec)
        out = np.zeros((n, ho, wo, spec.out_channels))
        if ho and wo:
            for i in range(spec.kernel_h):
                for j in range(spec.kernel_w):
                    out += _window(xp, i, j, spec, ho, wo) @ w[i, j]
        out += b
        self.saved.update(xp=xp, w=w, spec=spec, hw=(ho, wo), x_shape=x.shape)
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        xp, w, spec = self.saved["xp"], self.saved["w"], self.saved["spec"]
        ho, wo = self.saved["hw"]
        _, h, wd, cin = self.saved["x_shape"]
        dxp = np.zeros_like(xp)
        dw = np.zeros_like(w)
        g2 = grad.reshape(-1, spec.out_channels)
        for i in range(spec.kernel_h):
            for j in range(spec.kernel_w):
                win = _window(xp, i, j, spec, ho, wo)
                dw[i, j] = win.reshape(-1, cin).T @ g2
                _window(dxp, i, j, spec, ho, wo)[...] += grad @ w[i, j].T
        pt, _ = _pads(h, spec.kernel_h, spec.stride_h, spec.padding)
        pl, _ = _pads(wd, spec.kernel_w, spec.stride_w, spec.padding)
        dx = dxp[:, pt : pt + h, pl : pl + wd, :]
        return dx, dw, g2.sum(axis=0)


class DepthwiseConv2DOp(Function):
    """One kernel per channel; weights are (kernel_h, kernel_w, channels)"""

    op_name = "depthwise_conv2d"

    def forward(
        self, x: np.ndarray, w: np.ndarray, b: np.ndarray, spec: Conv2DSpec | None = None,
    ) -> np.ndarray:
        n, _, _, c = x.shape
        if c != spec.in_channels or w.shape != (spec.kernel_h, spec.kernel_w, c):
            msg = (
                f"depthwise_conv2d: input {x.shape} / weights {w.shape} do not match "
                f"kernel {(spec.kernel_h, spec.kernel_w, spec.in_channels)}"
            )
            raise ShapeError(msg)
        xp, ho, wo = _pad_input(x, spec)
        out = np.zeros((n, ho, wo, c))
        if ho and wo:
            for i in range(spec.kernel_h):
                for j in range(spec.kernel_w):
                    out += _window(xp, i, j, spec, ho, wo) * w[i, j]
        out += b
        self.saved.update(xp=xp, w=w, spec=spec, hw=(ho, wo), x_shape=x.shape)
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        xp, w, spec = self.saved["xp"], self.saved["w"], self.saved["spec"]
        ho, wo = self.saved["hw"]
        _, h, wd, c = self.saved["x_shape"]
        dxp = np.zeros_like(xp)
        dw = np.zeros_like(w)
        for i in range(spec.kernel_h):
            for j in range(spec.kernel_w):
                win = _window(xp, i, j, spec, ho, wo)
                dw[i, j] = np.sum(win * grad, axis=(0, 1, 2))
                _window(dxp, i, j, spec, ho, wo)[...] += grad * w[i, j]
        pt, _ = _pads(h, spec.kernel_h, spec.stride_h, spec.padding)
        pl, _ = _pads(wd, spec.kernel_w, spec.stride_w, spec.padding)
        dx = dxp[:, pt : pt + h, pl : pl + wd, :]
        return dx, dw, grad.reshape(-1, c).sum(axis=0)


def _batched(x: Tensor) -> tuple[Tensor, bool]:
    if x.ndim == 3:  # noqa: PLR2004
        return reshape(x, (1, *x.shape)), True
    if x.ndim != 4:  # noqa: PLR2004
        msg = f"expected an H×W×C or N×H×W×C image tensor, got shape {x.shape}"
        raise ShapeError(msg)
    return x, False


def _unbatched(y: Tensor, squeeze: bool) -> Tensor:
    return reshape(y, y.shape[1:]) if squeeze else y


def conv2d(x: Tensor, spec: Conv2DSpec, weights: Tensor, bias: Tensor) -> Tensor:
    xb, squeeze = _batched(x)
    return _unbatched(Conv2DOp.apply(xb, weights, bias, spec=spec), squeeze)


def gated_conv2d(
    x: Tensor,
    spec: Conv2DSpec,
    weights_feature: Tensor,
    weights_gate: Tensor,
    biases: tuple[Tensor, Tensor],
) -> Tensor:
    """conv(x; feature) ∘ sigmoid(conv(x; gate))"""
    feature = conv2d(x, spec, weights_feature, biases[0])
    gate = conv2d(x, spec, weights_gate, biases[1])
    return mul(feature, sigmoid(gate))


def depthwise_conv2d(x: Tensor, spec: Conv2DSpec, weights: Tensor, bias: Tensor) -> Tensor:
    xb, squeeze = _batched(x)
    return _unbatched(DepthwiseConv2DOp.apply(xb, weights, bias, spec=spec), squeeze)


def pointwise_spec(in_channels: int, out_channels: int) -> Conv2DSpec:
    return Conv2DSpec(
        kernel_h=1, kernel_w=1, in_channels=in_channels, out_channels=out_channels,
    )


def depthwise_separable_conv(
    x: Tensor,
    spec: Conv2DSpec,
    depth_weights: Tensor,
    point_weights: Tensor,
    biases: tuple[Tensor, Tensor],
) -> Tensor:
    """Depthwise kernel (stride and padding from ``spec``) then a 1×1 mix

    Batch normalisation and ReLU between and after the stages are the
    caller's job, as in a MobileNet block.
    """
    depth = depthwise_conv2d(x, spec, depth_weights, biases[0])
    return conv2d(depth, pointwise_spec(spec.in_channels, spec.out_channels), point_weights, biases[1])


class Conv2D(Layer):
    kind = "conv2d"

    def __init__(self, name: str, graph: Graph, spec: Conv2DSpec, rng: np.random.Generator) -> None:
        super().__init__(name, graph)
        self.spec = spec
        fan_in = spec.kernel_h * spec.kernel_w * spec.in_channels
        fan_out = spec.kernel_h * spec.kernel_w * spec.out_channels
        self.weight = self.add_param("weight", glorot_uniform(rng, spec.weight_shape, fan_in, fan_out))
        self.bias = self.add_param("bias", np.zeros(spec.out_channels))

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return conv2d(x, self.spec, self.weight, self.bias)


class GatedConv2D(Layer):
    kind = "gated_conv2d"

    def __init__(self, name: str, graph: Graph, spec: Conv2DSpec, rng: np.random.Generator) -> None:
        super().__init__(name, graph)
        self.spec = spec
        fan_in = spec.kernel_h * spec.kernel_w * spec.in_channels
        fan_out = spec.kernel_h * spec.kernel_w * spec.out_channels
        self.feature = self.add_param("feature", glorot_uniform(rng, spec.weight_shape, fan_in, fan_out))
        self.gate = self.add_param("gate", glorot_uniform(rng, spec.weight_shape, fan_in, fan_out))
        self.feature_bias = self.add_param("feature_bias", np.zeros(spec.out_channels))
        self.gate_bias = self.add_param("gate_bias", np.zeros(spec.out_channels))

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return gated_conv2d(x, self.spec, self.feature, self.gate, (self.feature_bias, self.gate_bias))


class SeparableConv2D(Layer):
    """Depthwise then pointwise; returns the pointwise output"""

    kind = "separable_conv2d"

    def __init__(self, name: str, graph: Graph, spec: Conv2DSpec, rng: np.random.Generator) -> None:
        super().__init__(name, graph)
        self.spec = spec
        kh, kw, cin, cout = spec.weight_shape
        self.depth = self.add_param("depth", glorot_uniform(rng, (kh, kw, cin), kh * kw, kh * kw))
        self.depth_bias = self.add_param("depth_bias", np.zeros(cin))
        self.point = self.add_param("point", glorot_uniform(rng, (1, 1, cin, cout), cin, cout))
        self.point_bias = self.add_param("point_bias", np.zeros(cout))

    def depthwise(self, x: Tensor) -> Tensor:
        return depthwise_conv2d(x, self.spec, self.depth, self.depth_bias)

    def pointwise(self, x: Tensor) -> Tensor:
        return conv2d(x, pointwise_spec(self.spec.in_channels, self.spec.out_channels), self.point, self.point_bias)

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return self.pointwise(self.depthwise(x))
