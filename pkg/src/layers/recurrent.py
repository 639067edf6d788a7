"""
LSTM and bidirectional LSTM

The whole recurrence over a sequence is one recorded op with hand-written
backpropagation through time. Gate order in the fused weight matrices is
input, forget, output, candidate. The initial hidden and cell states are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import ShapeError
from layers.base import Layer, glorot_uniform
from numerics import Function, Graph, Tensor, concat, reshape, reverse, stable_sigmoid


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    BIDIRECTIONAL = "bidirectional"


class LSTMSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    input_size: int = Field(gt=0)
    hidden_size: int = Field(gt=0)
    direction: Direction = Direction.FORWARD

    @property
    def output_size(self) -> int:
        if self.direction == Direction.BIDIRECTIONAL:
            return 2 * self.hidden_size
        return self.hidden_size


@dataclass(frozen=True)
class LSTMParams:
    """Weights of one direction: W (F×4H), U (H×4H), b (4H)"""

    w: Tensor
    u: Tensor
    b: Tensor


class LSTMSequenceOp(Function):
    op_name = "lstm"

    def forward(self, x: np.ndarray, w: np.ndarray, u: np.ndarray, b: np.ndarray) -> np.ndarray:
        n, t_steps, _ = x.shape
        hidden = u.shape[0]
        h = np.zeros((n, hidden))
        c = np.zeros((n, hidden))
        hs = np.zeros((n, t_steps, hidden))
        cache = []
        for t in range(t_steps):
            z = x[:, t] @ w + h @ u + b
            i = stable_sigmoid(z[:, :hidden])
            f = stable_sigmoid(z[:, hidden : 2 * hidden])
            o = stable_sigmoid(z[:, 2 * hidden : 3 * hidden])
            g = np.tanh(z[:, 3 * hidden :])
            c_prev, h_prev = c, h
            c = f * c_prev + i * g
            tc = np.tanh(c)
            h = o * tc
            hs[:, t] = h
            cache.append((i, f, o, g, c_prev, h_prev, tc))
        self.saved.update(x=x, w=w, u=u, cache=cache)
        return hs

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        x, w, u, cache = self.saved["x"], self.saved["w"], self.saved["u"], self.saved["cache"]
        n, t_steps, _ = x.shape
        hidden = u.shape[0]
        dx = np.zeros_like(x)
        dw = np.zeros_like(w)
        du = np.zeros_like(u)
        db = np.zeros(4 * hidden)
        dh_next = np.zeros((n, hidden))
        dc_next = np.zeros((n, hidden))
        for t in reversed(range(t_steps)):
            i, f, o, g, c_prev, h_prev, tc = cache[t]
            dh = grad[:, t] + dh_next
            dc = dc_next + dh * o * (1.0 - tc**2)
            dz = np.concatenate(
                [
                    dc * g * i * (1.0 - i),
                    dc * c_prev * f * (1.0 - f),
                    dh * tc * o * (1.0 - o),
                    dc * i * (1.0 - g**2),
                ],
                axis=1,
            )
            dw += x[:, t].T @ dz
            du += h_prev.T @ dz
            db += dz.sum(axis=0)
            dx[:, t] = dz @ w.T
            dh_next = dz @ u.T
            dc_next = dc * f
        return dx, dw, du, db


def _run(seq: Tensor, params: LSTMParams) -> Tensor:
    return LSTMSequenceOp.apply(seq, params.w, params.u, params.b)


def lstm_forward(
    seq: Tensor,
    spec: LSTMSpec,
    params: LSTMParams | tuple[LSTMParams, LSTMParams],
) -> Tensor:
    """Run an LSTM over T×F (or N×T×F); output T×H, or T×2H when bidirectional

    For bidirectional specs ``params`` is a (forward, backward) pair; the
    backward direction reads the sequence reversed and its outputs are
    re-reversed before the depth-wise concatenation.
    """
    squeeze = seq.ndim == 2  # noqa: PLR2004
    x = reshape(seq, (1, *seq.shape)) if squeeze else seq
    if x.ndim != 3 or x.shape[-1] != spec.input_size:  # noqa: PLR2004
        msg = f"lstm: sequence {seq.shape} does not match input size {spec.input_size}"
        raise ShapeError(msg)

    if spec.direction == Direction.BIDIRECTIONAL:
        fwd_params, bwd_params = params
        forward_out = _run(x, fwd_params)
        backward_out = reverse(_run(reverse(x, axis=1), bwd_params), axis=1)
        out = concat([forward_out, backward_out], axis=-1)
    elif spec.direction == Direction.BACKWARD:
        out = reverse(_run(reverse(x, axis=1), params), axis=1)
    else:
        out = _run(x, params)
    return reshape(out, out.shape[1:]) if squeeze else out


def _init_direction(layer: Layer, prefix: str, spec: LSTMSpec, rng: np.random.Generator) -> LSTMParams:
    f, h = spec.input_size, spec.hidden_size
    return LSTMParams(
        w=layer.add_param(f"{prefix}w", glorot_uniform(rng, (f, 4 * h), f, 4 * h)),
        u=layer.add_param(f"{prefix}u", glorot_uniform(rng, (h, 4 * h), h, 4 * h)),
        b=layer.add_param(f"{prefix}b", np.zeros(4 * h)),
    )


class LSTM(Layer):
    kind = "lstm"

    def __init__(self, name: str, graph: Graph, spec: LSTMSpec, rng: np.random.Generator) -> None:
        super().__init__(name, graph)
        self.spec = spec
        if spec.direction == Direction.BIDIRECTIONAL:
            self.directions: LSTMParams | tuple[LSTMParams, LSTMParams] = (
                _init_direction(self, "fwd.", spec, rng),
                _init_direction(self, "bwd.", spec, rng),
            )
        else:
            self.directions = _init_direction(self, "", spec, rng)

    def __call__(self, x: Tensor, training: bool = False, rng: np.random.Generator | None = None) -> Tensor:
        return lstm_forward(x, self.spec, self.directions)


class BiLSTM(LSTM):
    kind = "bilstm"

    def __init__(self, name: str, graph: Graph, input_size: int, hidden_size: int, rng: np.random.Generator) -> None:
        spec = LSTMSpec(
            input_size=input_size, hidden_size=hidden_size, direction=Direction.BIDIRECTIONAL,
        )
        super().__init__(name, graph, spec, rng)
