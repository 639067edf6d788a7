"""
Reduce-on-plateau learning-rate schedule with early stopping
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

logger = logging.getLogger(__name__)


@dataclass
class PlateauSchedule:
    lr: float
    factor: float = 0.2
    patience: int = 10
    stop_patience: int = 20
    min_delta: float = 1e-6
    best: float = math.inf
    stale: int = 0
    plateau_stale: int = 0

    def update(self, val_loss: float) -> bool:
        """Record one epoch's validation loss; True when it is a new best

        A loss counts as an improvement only when it beats the best so far
        by at least ``min_delta``.
        """
        if math.isfinite(val_loss) and val_loss <= self.best - self.min_delta:
            self.best = val_loss
            self.stale = 0
            self.plateau_stale = 0
            return True
        self.stale += 1
        self.plateau_stale += 1
        if self.plateau_stale >= self.patience:
            old = self.lr
            self.lr = self.lr * self.factor
            self.plateau_stale = 0
            logger.info("Validation loss plateaued for %d epochs; lr %.6g -> %.6g", self.patience, old, self.lr)
        return False

    @property
    def should_stop(self) -> bool:
        return self.stale >= self.stop_patience

    def to_dict(self) -> dict[str, float | int]:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict[str, float | int]) -> PlateauSchedule:
        return cls(**values)  # type: ignore[arg-type]
