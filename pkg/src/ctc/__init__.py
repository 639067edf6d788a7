"""
Connectionist temporal classification
"""

from .loss import (
    CTCBatchLoss,
    collapse,
    ctc_batch_loss,
    ctc_loss,
    ctc_loss_from_logits,
    label_feasible,
    log_likelihood,
    min_frames,
    repeats,
)
from .matrix import Label, ProbMatrix, as_label

__all__ = [
    "CTCBatchLoss",
    "Label",
    "ProbMatrix",
    "as_label",
    "collapse",
    "ctc_batch_loss",
    "ctc_loss",
    "ctc_loss_from_logits",
    "label_feasible",
    "log_likelihood",
    "min_frames",
    "repeats",
]
