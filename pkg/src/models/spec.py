"""
Model specification
"""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from errors import ConfigError


class ModelKind(str, Enum):
    SIMPLE_CNN = "simple_cnn"
    MOBILENET_MINI = "mobilenet_mini"
    SIMPLE_HTR = "simple_htr"
    BLUCHE = "bluche"
    PUIGCERVER = "puigcerver"

    @property
    def is_htr(self) -> bool:
        return self in HTR_KINDS


class Variant(str, Enum):
    FULL = "full"
    SMALL = "small"


HTR_KINDS = frozenset({ModelKind.SIMPLE_HTR, ModelKind.BLUCHE, ModelKind.PUIGCERVER})
CLASSIFIER_KINDS = frozenset({ModelKind.SIMPLE_CNN, ModelKind.MOBILENET_MINI})

# (height, width) each kind is built for by default
DEFAULT_INPUT: dict[ModelKind, tuple[int, int]] = {
    ModelKind.SIMPLE_HTR: (32, 128),
    ModelKind.BLUCHE: (32, 128),
    ModelKind.PUIGCERVER: (32, 128),
    ModelKind.SIMPLE_CNN: (61, 512),
    ModelKind.MOBILENET_MINI: (61, 512),
}


class ModelSpec(BaseModel):
    """What to build: architecture kind, output size and input geometry"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: ModelKind
    charset_size: int | None = Field(default=None, gt=0)
    num_classes: int | None = Field(default=None, gt=0)
    input_h: int | None = Field(default=None, gt=0)
    input_w: int | None = Field(default=None, gt=0)
    variant: Variant = Variant.FULL
    width_multiplier: float = Field(default=1.0, gt=0.0, le=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def _fill_defaults(self) -> ModelSpec:
        if self.kind.is_htr and self.charset_size is None:
            msg = f"{self.kind.value} needs charset_size"
            raise ValueError(msg)
        if not self.kind.is_htr and self.num_classes is None:
            msg = f"{self.kind.value} needs num_classes"
            raise ValueError(msg)
        default_h, default_w = DEFAULT_INPUT[self.kind]
        if self.input_h is None:
            object.__setattr__(self, "input_h", default_h)
        if self.input_w is None:
            object.__setattr__(self, "input_w", default_w)
        return self

    @property
    def output_classes(self) -> int:
        """charset + blank for HTR kinds, num_classes for classifiers"""
        if self.kind.is_htr:
            return self.charset_size + 1
        return self.num_classes


def validate_input_size(spec: ModelSpec) -> None:
    """Raise ConfigError if the architecture cannot consume the input size"""
    h, w = spec.input_h, spec.input_w
    kind = spec.kind
    if kind == ModelKind.SIMPLE_HTR and (h != 32 or w % 4):  # noqa: PLR2004
        msg = f"simple_htr requires input height 32 and width divisible by 4, got {h}×{w}"
        raise ConfigError(msg)
    if kind == ModelKind.BLUCHE and (h % 16 or w % 4):
        msg = f"bluche requires height divisible by 16 and width by 4, got {h}×{w}"
        raise ConfigError(msg)
    if kind == ModelKind.PUIGCERVER and (h % 8 or w % 8):
        msg = f"puigcerver requires height and width divisible by 8, got {h}×{w}"
        raise ConfigError(msg)
    if kind == ModelKind.SIMPLE_CNN and (h < 4 or w < 4):  # noqa: PLR2004
        msg = f"simple_cnn requires at least 4×4 input (built for 61×512), got {h}×{w}"
        raise ConfigError(msg)
    if kind == ModelKind.MOBILENET_MINI and (h < 32 or w < 32):  # noqa: PLR2004
        msg = f"mobilenet_mini requires at least 32×32 input, got {h}×{w}"
        raise ConfigError(msg)
