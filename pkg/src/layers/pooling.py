"""
Max and global-average pooling

Pooling windows do not overlap (stride = window). Odd trailing rows or
columns that do not fill a window are dropped.
"""

from __future__ import annotations

import numpy as np

from errors import ShapeError
from layers.base import Layer
from layers.conv import _batched, _unbatched
from numerics import Function, Graph, Tensor


class MaxPoolOp(Function):
    op_name = "maxpool"

    def forward(self, x: np.ndarray, pool: tuple[int, int] = (2, 2)) -> np.ndarray:
        n, h, w, c = x.shape
        ph, pw = pool
        ho, wo = h // ph, w // pw
        blocks = x[:, : ho * ph, : wo * pw, :].reshape(n, ho, ph, wo, pw, c)
        flat = blocks.transpose(0, 1, 3, 5, 2, 4).reshape(n, ho, wo, c, ph * pw)
        # First maximum wins on ties
        idx = np.argmax(flat, axis=-1)
        self.saved.update(idx=idx, pool=pool, x_shape=x.shape)
        return np.take_along_axis(flat, idx[..., None], axis=-1)[..., 0]

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        idx, (ph, pw) = self.saved["idx"], self.saved["pool"]
        n, h, w, c = self.saved["x_shape"]
        ho, wo = h // ph, w // pw
        flat = np.zeros((n, ho, wo, c, ph * pw))
        np.put_along_axis(flat, idx[..., None], grad[..., None], axis=-1)
        blocks = flat.reshape(n, ho, wo, c, ph, pw).transpose(0, 1, 4, 2, 5, 3)
        dx = np.zeros((n, h, w, c))
        dx[:, : ho * ph, : wo * pw, :] = blocks.reshape(n, ho * ph, wo * pw, c)
        return (dx,)


class GlobalAvgPoolOp(Function):
    op_name = "avgpool_global"

    def forward(self, x: np.ndarray) -> np.ndarray:
        self.saved["x_shape"] = x.shape
        return x.mean(axis=(1, 2))

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        n, h, w, c = self.saved["x_shape"]
        return (np.broadcast_to(grad[:, None, None, :] / (h * w), (n, h, w, c)).copy(),)


def maxpool(x: Tensor, pool_h: int = 2, pool_w: int = 2) -> Tensor:
    if pool_h < 1 or pool_w < 1:
        msg = f"maxpool window must be positive, got {(pool_h, pool_w)}"
        raise ShapeError(msg)
    xb, squeeze = _batched(x)
    return _unbatched(MaxPoolOp.apply(xb, pool=(pool_h, pool_w)), squeeze)


def maxpool2x2(x: Tensor) -> Tensor:
    """Halves each spatial dimension"""
    return maxpool(x, 2, 2)


def avgpool_global(x: Tensor) -> Tensor:
    """H×W×C → C (or N×H×W×C → N×C)"""
    xb, squeeze = _batched(x)
    out = GlobalAvgPoolOp.apply(xb)
    return _unbatched(out, squeeze)


class MaxPool(Layer):
    kind = "maxpool"

    def __init__(self, name: str, graph: Graph, pool_h: int = 2, pool_w: int = 2) -> None:
        super().__init__(name, graph)
        self.pool = (pool_h, pool_w)

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return maxpool(x, *self.pool)


class GlobalAvgPool(Layer):
    kind = "avgpool_global"

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return avgpool_global(x)
