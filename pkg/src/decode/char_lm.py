"""
Character bigram language model

Counts transitions over charset symbols plus a word-boundary state (index
``len(charset)``) and smooths them additively, so every conditional row is a
proper distribution.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from data.charset import Charset, nfc
from errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_SMOOTHING = 1.0


class CharLM:
    def __init__(self, log_probs: np.ndarray, charset: Charset, smoothing: float = DEFAULT_SMOOTHING) -> None:
        states = len(charset) + 1
        if log_probs.shape != (states, states):
            msg = f"bigram table must be {states}×{states}, got {log_probs.shape}"
            raise ConfigError(msg)
        self.log_probs = log_probs
        self.charset = charset
        self.smoothing = smoothing

    @property
    def boundary(self) -> int:
        return len(self.charset)

    def log_prob(self, previous: int | None, symbol: int | None) -> float:
        """ln p(symbol | previous); None stands for the word boundary"""
        row = self.boundary if previous is None else previous
        col = self.boundary if symbol is None else symbol
        return float(self.log_probs[row, col])

    def score(self, label: Iterable[int]) -> float:
        """Log probability of a whole labeling between two boundaries"""
        total = 0.0
        previous = None
        for symbol in label:
            total += self.log_prob(previous, symbol)
            previous = symbol
        return total + self.log_prob(previous, None)

    @classmethod
    def train(cls, lines: Iterable[str], charset: Charset, smoothing: float = DEFAULT_SMOOTHING) -> CharLM:
        if smoothing <= 0:
            msg = f"smoothing must be positive, got {smoothing}"
            raise ConfigError(msg)
        states = len(charset) + 1
        boundary = len(charset)
        counts = np.zeros((states, states))
        skipped = 0
        for line in lines:
            symbols = []
            for ch in nfc(line.strip()):
                if ch in charset:
                    symbols.append(charset.index(ch))
                else:
                    skipped += 1
            if not symbols:
                continue
            sequence = [boundary, *symbols, boundary]
            for prev, nxt in zip(sequence, sequence[1:]):
                counts[prev, nxt] += 1
        if skipped:
            logger.debug("Ignored %d corpus characters outside %s", skipped, charset.name)
        smoothed = counts + smoothing
        log_probs = np.log(smoothed / smoothed.sum(axis=1, keepdims=True))
        return cls(log_probs, charset, smoothing)

    @classmethod
    def from_file(cls, path: str | Path, charset: Charset, smoothing: float = DEFAULT_SMOOTHING) -> CharLM:
        path = Path(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        lm = cls.train(lines, charset, smoothing)
        logger.info("Trained character bigram model on %d lines from %s", len(lines), path)
        return lm
