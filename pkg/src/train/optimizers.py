"""
Optimisers

The step functions are pure: they take parameter, gradient and slot arrays
and return new ones. ``Optimizer`` applies them to a model's tensors in
place and exposes its slots for checkpointing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from errors import ShapeError
from numerics import Tensor
from train.config import OptimizerName

logger = logging.getLogger(__name__)

ADADELTA_RHO = 0.95
ADADELTA_EPS = 1e-6
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

Arrays = dict[str, np.ndarray]


@dataclass
class OptimizerState:
    """Step counter plus per-parameter slots keyed ``"<slot>/<param>"``"""

    step: int = 0
    slots: Arrays = field(default_factory=dict)

    def slot(self, kind: str, name: str, like: np.ndarray) -> np.ndarray:
        return self.slots.get(f"{kind}/{name}", np.zeros_like(like))


def _check_shapes(params: Arrays, grads: Arrays) -> None:
    for name, value in params.items():
        if name not in grads or grads[name].shape != value.shape:
            got = grads[name].shape if name in grads else None
            msg = f"gradient for {name} has shape {got}, parameter has {value.shape}"
            raise ShapeError(msg)


def adadelta_step(
    params: Arrays,
    grads: Arrays,
    state: OptimizerState,
    lr: float = 1.0,
    rho: float = ADADELTA_RHO,
    eps: float = ADADELTA_EPS,
) -> tuple[Arrays, OptimizerState]:
    """Adadelta with a learning-rate multiplier on the update"""
    _check_shapes(params, grads)
    new_params: Arrays = {}
    slots: Arrays = {}
    for name, value in params.items():
        g = grads[name]
        sq_grad = rho * state.slot("sq_grad", name, value) + (1.0 - rho) * g * g
        sq_delta = state.slot("sq_delta", name, value)
        update = np.sqrt(sq_delta + eps) / np.sqrt(sq_grad + eps) * g
        new_params[name] = value - lr * update
        slots[f"sq_grad/{name}"] = sq_grad
        slots[f"sq_delta/{name}"] = rho * sq_delta + (1.0 - rho) * update * update
    return new_params, OptimizerState(state.step + 1, slots)


def adam_step(
    params: Arrays,
    grads: Arrays,
    state: OptimizerState,
    lr: float = 0.001,
    beta1: float = ADAM_BETA1,
    beta2: float = ADAM_BETA2,
    eps: float = ADAM_EPS,
) -> tuple[Arrays, OptimizerState]:
    """Adam with bias-corrected moments"""
    _check_shapes(params, grads)
    step = state.step + 1
    new_params: Arrays = {}
    slots: Arrays = {}
    for name, value in params.items():
        g = grads[name]
        m = beta1 * state.slot("m", name, value) + (1.0 - beta1) * g
        v = beta2 * state.slot("v", name, value) + (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1**step)
        v_hat = v / (1.0 - beta2**step)
        new_params[name] = value - lr * m_hat / (np.sqrt(v_hat) + eps)
        slots[f"m/{name}"] = m
        slots[f"v/{name}"] = v
    return new_params, OptimizerState(step, slots)


def clip_by_global_norm(grads: Arrays, max_norm: float | None) -> tuple[Arrays, float]:
    """Scale all gradients together so their joint L2 norm is at most ``max_norm``"""
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if max_norm is None or norm <= max_norm or norm == 0.0:
        return grads, norm
    factor = max_norm / norm
    return {name: g * factor for name, g in grads.items()}, norm


class Optimizer:
    def __init__(self, name: OptimizerName, lr: float) -> None:
        self.name = OptimizerName(name)
        self.lr = lr
        self.state = OptimizerState()

    def __repr__(self) -> str:
        return f"Optimizer({self.name.value}, lr={self.lr}, step={self.state.step})"

    def step(self, parameters: dict[str, Tensor], grads: Arrays) -> None:
        values = {name: tensor.data for name, tensor in parameters.items()}
        if self.name == OptimizerName.ADADELTA:
            updated, self.state = adadelta_step(values, grads, self.state, self.lr)
        else:
            updated, self.state = adam_step(values, grads, self.state, self.lr)
        for name, tensor in parameters.items():
            tensor.data = updated[name]

    def slot_tensors(self) -> Arrays:
        return {f"opt:{key}": value for key, value in self.state.slots.items()}

    def load(self, step: int, tensors: Arrays) -> None:
        slots = {key[len("opt:") :]: np.array(value) for key, value in tensors.items() if key.startswith("opt:")}
        self.state = OptimizerState(step, slots)
        logger.debug("Restored %s optimiser at step %d with %d slots", self.name.value, step, len(slots))
