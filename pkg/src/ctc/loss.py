"""
CTC collapse, forward-backward loss and its gradient

The recursions run over the blank-interleaved label (blank, l1, blank, l2,
..., blank) in log space. ``alpha[t, s]`` is the log mass of path prefixes
ending in state s at frame t, including frame t. ``beta[t, s]`` is the log
mass of the suffix after frame t given state s at t (frame t excluded), so
``alpha[t] + beta[t]`` log-sums to the label's log probability at every t.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from ctc.matrix import Label, ProbMatrix, as_label
from errors import ContractError, FeasibilityError
from numerics import Function, Tensor, log_softmax_array

logger = logging.getLogger(__name__)


def collapse(path: Sequence[int], blank: int) -> Label:
    """Merge adjacent repeats, then drop blanks"""
    result: list[int] = []
    previous = None
    for symbol in path:
        if symbol != previous and symbol != blank:
            result.append(int(symbol))
        previous = symbol
    return tuple(result)


def repeats(label: Sequence[int]) -> int:
    return sum(1 for a, b in zip(label, label[1:]) if a == b)


def min_frames(label: Sequence[int]) -> int:
    """Shortest path that collapses to ``label``: repeats need a blank between"""
    return len(label) + repeats(label)


def label_feasible(label: Sequence[int], t_steps: int) -> bool:
    return min_frames(label) <= t_steps


def _check_label(label: Label, num_classes: int, t_steps: int) -> None:
    blank = num_classes - 1
    for position, symbol in enumerate(label):
        if not 0 <= symbol < blank:
            msg = f"Label symbol {symbol} at position {position} is outside the charset (0..{blank - 1})"
            raise ContractError(msg)
    if not label_feasible(label, t_steps):
        msg = (
            f"Label of length {len(label)} with {repeats(label)} repeats needs at least "
            f"{min_frames(label)} frames, matrix has {t_steps}"
        )
        raise FeasibilityError(msg)


def _extended(label: Label, blank: int) -> tuple[np.ndarray, np.ndarray]:
    """Interleaved states and the mask of states reachable by skipping one back"""
    states = np.full(2 * len(label) + 1, blank, dtype=np.int64)
    states[1::2] = label
    skip = np.zeros(len(states), dtype=bool)
    if len(states) > 2:  # noqa: PLR2004
        skip[2:] = (states[2:] != blank) & (states[2:] != states[:-2])
    return states, skip


def _shift(row: np.ndarray, by: int) -> np.ndarray:
    shifted = np.full_like(row, -np.inf)
    shifted[by:] = row[:-by]
    return shifted


def _unshift(row: np.ndarray, by: int) -> np.ndarray:
    shifted = np.full_like(row, -np.inf)
    shifted[:-by] = row[by:]
    return shifted


def forward_log(log_probs: np.ndarray, states: np.ndarray, skip: np.ndarray) -> np.ndarray:
    t_steps = log_probs.shape[0]
    alpha = np.full((t_steps, len(states)), -np.inf)
    alpha[0, 0] = log_probs[0, states[0]]
    if len(states) > 1:
        alpha[0, 1] = log_probs[0, states[1]]
    for t in range(1, t_steps):
        prev = alpha[t - 1]
        total = np.logaddexp(prev, _shift(prev, 1))
        if len(states) > 2:  # noqa: PLR2004
            total = np.where(skip, np.logaddexp(total, _shift(prev, 2)), total)
        alpha[t] = total + log_probs[t, states]
    return alpha


def backward_log(log_probs: np.ndarray, states: np.ndarray, skip: np.ndarray) -> np.ndarray:
    t_steps = log_probs.shape[0]
    beta = np.full((t_steps, len(states)), -np.inf)
    beta[-1, -1] = 0.0
    if len(states) > 1:
        beta[-1, -2] = 0.0
    for t in range(t_steps - 2, -1, -1):
        nxt = beta[t + 1] + log_probs[t + 1, states]
        total = np.logaddexp(nxt, _unshift(nxt, 1))
        if len(states) > 2:  # noqa: PLR2004
            # state s may jump to s+2 when s+2 is a skip target
            jumps = np.zeros_like(skip)
            jumps[:-2] = skip[2:]
            total = np.logaddexp(total, np.where(jumps, _unshift(nxt, 2), -np.inf))
        beta[t] = total
    return beta


def _final_log_prob(alpha: np.ndarray) -> float:
    last = alpha[-1]
    if len(last) > 1:
        return float(np.logaddexp(last[-1], last[-2]))
    return float(last[-1])


def log_likelihood(log_probs: np.ndarray, label: Sequence[int]) -> float:
    """ln Σ over alignments of Π_t y[t, π_t]; −inf when no alignment has mass"""
    label = as_label(label)
    num_classes = log_probs.shape[1]
    _check_label(label, num_classes, log_probs.shape[0])
    if log_probs.shape[0] == 0:
        return 0.0
    states, skip = _extended(label, num_classes - 1)
    return _final_log_prob(forward_log(log_probs, states, skip))


def _loss_and_grad(log_probs: np.ndarray, label: Label) -> tuple[float, np.ndarray]:
    t_steps, num_classes = log_probs.shape
    _check_label(label, num_classes, t_steps)
    if t_steps == 0:
        # only the empty label fits zero frames, with probability 1
        return 0.0, np.zeros_like(log_probs)
    states, skip = _extended(label, num_classes - 1)
    alpha = forward_log(log_probs, states, skip)
    log_p = _final_log_prob(alpha)
    probs = np.exp(log_probs)
    if not np.isfinite(log_p):
        logger.debug("CTC label has zero probability under the matrix")
        return float("inf"), np.zeros_like(probs)
    beta = backward_log(log_probs, states, skip)
    occupancy = np.exp(alpha + beta - log_p)
    posterior = np.zeros_like(probs)
    for s, symbol in enumerate(states):
        posterior[:, symbol] += occupancy[:, s]
    return -log_p, probs - posterior


def ctc_loss(m: ProbMatrix, label: Sequence[int]) -> tuple[float, np.ndarray]:
    """Negative log probability of ``label`` and its gradient w.r.t. the logits

    The gradient assumes ``m`` is the softmax of the logits, giving
    ``y[t, k] − posterior[t, k]``.
    """
    return _loss_and_grad(m.log_probs(), as_label(label))


def ctc_loss_from_logits(logits: np.ndarray, label: Sequence[int]) -> tuple[float, np.ndarray]:
    return _loss_and_grad(log_softmax_array(np.asarray(logits, dtype=np.float64)), as_label(label))


class CTCBatchLoss(Function):
    """Mean CTC loss over a batch of N×T×(C+1) logits"""

    op_name = "ctc_loss"

    def forward(self, logits: np.ndarray, labels: tuple[Label, ...] = ()) -> np.ndarray:
        if len(labels) != logits.shape[0]:
            msg = f"ctc batch has {logits.shape[0]} matrices but {len(labels)} labels"
            raise ContractError(msg)
        losses = np.zeros(len(labels))
        grad = np.zeros_like(logits)
        for i, label in enumerate(labels):
            losses[i], grad[i] = ctc_loss_from_logits(logits[i], label)
        self.saved["grad"] = grad / len(labels)
        self.saved["losses"] = losses
        return np.array(losses.mean())

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (self.saved["grad"] * grad,)


def ctc_batch_loss(logits: Tensor, labels: Sequence[Sequence[int]]) -> Tensor:
    return CTCBatchLoss.apply(logits, labels=tuple(as_label(label) for label in labels))
