"""
Training configuration and the classifier experiment presets
"""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from errors import ConfigError
from models.spec import ModelKind


class OptimizerName(str, Enum):
    ADADELTA = "adadelta"
    ADAM = "adam"


class TrainConfig(BaseModel):
    """Optimiser, schedule and stopping settings for one run"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    batch_size: int = Field(default=32, ge=1)
    lr: float = Field(default=0.001, ge=0.0)
    optimizer: OptimizerName = OptimizerName.ADAM
    early_stop_patience: int = Field(default=20, ge=1)
    plateau_patience: int = Field(default=10, ge=1)
    plateau_factor: float = Field(default=0.2, gt=0.0, lt=1.0)
    min_delta: float = Field(default=1e-6, ge=0.0)
    max_epochs: int = Field(default=150, ge=1)
    seed: int = Field(default=0, ge=0)
    # None disables clipping
    clip_norm: float | None = Field(default=5.0, gt=0.0)
    val_fraction: float = Field(default=0.1, gt=0.0, lt=1.0)


EXPERIMENTS: dict[int, tuple[ModelKind, TrainConfig]] = {
    1: (ModelKind.SIMPLE_CNN, TrainConfig(optimizer=OptimizerName.ADADELTA, lr=0.01, batch_size=32, max_epochs=150)),
    2: (ModelKind.MOBILENET_MINI, TrainConfig(optimizer=OptimizerName.ADADELTA, lr=1.0, batch_size=32, max_epochs=150)),
    3: (ModelKind.MOBILENET_MINI, TrainConfig(optimizer=OptimizerName.ADADELTA, lr=0.01, batch_size=32, max_epochs=150)),
}


def experiment_config(number: int) -> TrainConfig:
    """Training settings of classifier experiment 1, 2 or 3"""
    if number not in EXPERIMENTS:
        msg = f"Unknown experiment {number}; choose one of {', '.join(map(str, EXPERIMENTS))}"
        raise ConfigError(msg)
    return EXPERIMENTS[number][1]


def experiment_model(number: int) -> ModelKind:
    if number not in EXPERIMENTS:
        msg = f"Unknown experiment {number}; choose one of {', '.join(map(str, EXPERIMENTS))}"
        raise ConfigError(msg)
    return EXPERIMENTS[number][0]
