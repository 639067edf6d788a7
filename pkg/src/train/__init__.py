"""
Training

Optimisers, the plateau schedule, the CTC and classifier training loops
and evaluation helpers. The checkpoint codec lives in ``models.checkpoint``
and is re-exported here.
"""

from models.checkpoint import FORMAT_VERSION, MAGIC, Checkpoint, ResumeState, TrainingState

from .config import EXPERIMENTS, OptimizerName, TrainConfig, experiment_config, experiment_model
from .evaluate import (
    Recognition,
    evaluate_classifier,
    evaluate_decoder,
    evaluate_htr,
    logits_for,
    matrices_for,
    output_steps,
    recognize,
    transcribe,
)
from .loop import (
    HISTORY_COLUMNS,
    EpochRecord,
    TrainResult,
    fit,
    fit_classifier,
    fit_htr,
    last_path,
    train_classifier,
    train_htr,
)
from .optimizers import Optimizer, OptimizerState, adadelta_step, adam_step, clip_by_global_norm
from .samples import Samples, load_entries, load_split
from .schedule import PlateauSchedule

__all__ = [
    "EXPERIMENTS",
    "FORMAT_VERSION",
    "HISTORY_COLUMNS",
    "MAGIC",
    "Checkpoint",
    "EpochRecord",
    "Optimizer",
    "OptimizerName",
    "OptimizerState",
    "PlateauSchedule",
    "Recognition",
    "ResumeState",
    "Samples",
    "TrainConfig",
    "TrainResult",
    "TrainingState",
    "adadelta_step",
    "adam_step",
    "clip_by_global_norm",
    "evaluate_classifier",
    "evaluate_decoder",
    "evaluate_htr",
    "experiment_config",
    "experiment_model",
    "fit",
    "fit_classifier",
    "fit_htr",
    "last_path",
    "load_entries",
    "load_split",
    "logits_for",
    "matrices_for",
    "output_steps",
    "recognize",
    "train_classifier",
    "train_htr",
    "transcribe",
]
