"""
Numerics Layer

Dense float64 tensors with reverse-mode automatic differentiation.
"""

from .gradcheck import check_gradients, numerical_gradient, relative_error
from .ops import (
    add,
    add_bias,
    concat,
    constant,
    exp,
    leaky_relu,
    log,
    log_softmax_array,
    log_softmax_rows,
    matmul,
    mean,
    mul,
    relu,
    reshape,
    reverse,
    scale,
    sigmoid,
    softmax_array,
    softmax_rows,
    stable_sigmoid,
    sub,
    sum_all,
    tanh,
    transpose,
)
from .tensor import DTYPE, Function, Graph, Node, Tensor, as_tensor, backward

__all__ = [
    "DTYPE",
    "Function",
    "Graph",
    "Node",
    "Tensor",
    "add",
    "add_bias",
    "as_tensor",
    "backward",
    "check_gradients",
    "concat",
    "constant",
    "exp",
    "leaky_relu",
    "log",
    "log_softmax_array",
    "log_softmax_rows",
    "matmul",
    "mean",
    "mul",
    "numerical_gradient",
    "relative_error",
    "relu",
    "reshape",
    "reverse",
    "scale",
    "sigmoid",
    "softmax_array",
    "softmax_rows",
    "stable_sigmoid",
    "sub",
    "sum_all",
    "tanh",
    "transpose",
]
