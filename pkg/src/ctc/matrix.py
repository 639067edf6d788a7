"""
Network output matrix and label types
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from errors import ContractError, ShapeError

ROW_SUM_TOLERANCE = 1e-9

Label = tuple[int, ...]


@dataclass(frozen=True)
class ProbMatrix:
    """T×(C+1) per-frame class probabilities; the last column is the blank"""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[1] < 1:  # noqa: PLR2004
            msg = f"ProbMatrix must be T×(C+1), got shape {probs.shape}"
            raise ShapeError(msg)
        if probs.size and (probs.min() < 0.0 or probs.max() > 1.0):
            msg = "ProbMatrix entries must lie in [0, 1]"
            raise ContractError(msg)
        sums = probs.sum(axis=1)
        if probs.shape[0] and np.max(np.abs(sums - 1.0)) > ROW_SUM_TOLERANCE:
            msg = f"ProbMatrix rows must sum to 1 (worst row sums to {sums[np.argmax(np.abs(sums - 1.0))]!r})"
            raise ContractError(msg)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_logits(cls, logits: np.ndarray) -> ProbMatrix:
        logits = np.asarray(logits, dtype=np.float64)
        shifted = logits - logits.max(axis=-1, keepdims=True)
        ex = np.exp(shifted)
        return cls(ex / ex.sum(axis=-1, keepdims=True))

    @property
    def t_steps(self) -> int:
        return self.probs.shape[0]

    @property
    def num_classes(self) -> int:
        return self.probs.shape[1]

    @property
    def blank(self) -> int:
        return self.num_classes - 1

    @property
    def charset_size(self) -> int:
        return self.num_classes - 1

    def log_probs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.probs)


def as_label(symbols: Sequence[int]) -> Label:
    return tuple(int(s) for s in symbols)
