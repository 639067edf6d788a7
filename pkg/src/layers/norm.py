"""
Batch normalisation and dropout

Both behave differently in training and inference. Batch normalisation
normalises over every axis but the last (channels / features) and keeps
momentum-0.9 running averages for inference. The variance is floored at
``epsilon`` instead of being offset by it, so unit running variance maps
values through unchanged.
"""

from __future__ import annotations

import numpy as np

from errors import ContractError, ShapeError
from layers.base import Layer
from numerics import Function, Graph, Tensor

MOMENTUM = 0.9
EPSILON = 1e-5


class BatchNormOp(Function):
    op_name = "batchnorm"

    def forward(
        self,
        x: np.ndarray,
        gamma: np.ndarray,
        beta: np.ndarray,
        mean: np.ndarray | None = None,
        var: np.ndarray | None = None,
        epsilon: float = EPSILON,
        batch_stats: bool = False,
    ) -> np.ndarray:
        if x.shape[-1] != gamma.shape[0]:
            msg = f"batchnorm: input {x.shape} does not match {gamma.shape[0]} features"
            raise ShapeError(msg)
        floored = var < epsilon
        inv_std = 1.0 / np.sqrt(np.where(floored, epsilon, var))
        x_hat = (x - mean) * inv_std
        self.saved.update(
            x_hat=x_hat, inv_std=inv_std, gamma=gamma, floored=floored, batch_stats=batch_stats,
        )
        return gamma * x_hat + beta

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x_hat, inv_std = self.saved["x_hat"], self.saved["inv_std"]
        gamma, floored = self.saved["gamma"], self.saved["floored"]
        axes = tuple(range(grad.ndim - 1))
        dgamma = np.sum(grad * x_hat, axis=axes)
        dbeta = np.sum(grad, axis=axes)
        dx_hat = grad * gamma
        if self.saved["batch_stats"]:
            count = grad.size // grad.shape[-1]
            mean_term = np.sum(dx_hat, axis=axes) / count
            # A floored variance is a constant, so only the mean term flows
            var_term = np.where(floored, 0.0, np.sum(dx_hat * x_hat, axis=axes) / count)
            dx = (dx_hat - mean_term - x_hat * var_term) * inv_std
        else:
            dx = dx_hat * inv_std
        return dx, dgamma, dbeta


class DropoutOp(Function):
    op_name = "dropout"

    def forward(self, x: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
        self.saved["mask"] = mask
        return x * mask

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad * self.saved["mask"],)


def batchnorm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running: dict[str, np.ndarray],
    training: bool = False,
    momentum: float = MOMENTUM,
    epsilon: float = EPSILON,
) -> Tensor:
    """Normalise with batch statistics (training) or running ones (inference)

    In training mode ``running`` is updated in place.
    """
    if training:
        axes = tuple(range(x.ndim - 1))
        mean = x.data.mean(axis=axes)
        var = x.data.var(axis=axes)
        running["mean"] = momentum * running["mean"] + (1.0 - momentum) * mean
        running["var"] = momentum * running["var"] + (1.0 - momentum) * var
    else:
        mean, var = running["mean"], running["var"]
    return BatchNormOp.apply(
        x, gamma, beta, mean=mean, var=var, epsilon=epsilon, batch_stats=training,
    )


def dropout(
    x: Tensor, p: float, training: bool = False, rng: np.random.Generator | None = None,
) -> Tensor:
    """Inverted dropout: survivors are scaled by 1/(1-p); identity at inference"""
    if not 0.0 <= p < 1.0:
        msg = f"dropout probability must be in [0, 1), got {p}"
        raise ContractError(msg)
    if not training or p == 0.0:
        return x
    if rng is None:
        msg = "dropout in training mode needs a random generator"
        raise ContractError(msg)
    mask = (rng.random(x.shape) >= p) / (1.0 - p)
    return DropoutOp.apply(x, mask=mask)


class BatchNorm(Layer):
    kind = "batchnorm"

    def __init__(self, name: str, graph: Graph, features: int, momentum: float = MOMENTUM, epsilon: float = EPSILON) -> None:
        super().__init__(name, graph)
        self.momentum = momentum
        self.epsilon = epsilon
        self.gamma = self.add_param("gamma", np.ones(features))
        self.beta = self.add_param("beta", np.zeros(features))
        self.buffers["mean"] = np.zeros(features)
        self.buffers["var"] = np.ones(features)

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return batchnorm(x, self.gamma, self.beta, self.buffers, training, self.momentum, self.epsilon)


class Dropout(Layer):
    kind = "dropout"

    def __init__(self, name: str, graph: Graph, p: float) -> None:
        super().__init__(name, graph)
        self.p = p

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return dropout(x, self.p, training, rng)
