"""
Imaging

Grayscale image type, PGM/PNG I/O and the preprocessing chain that turns
a scanned word into a model input.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from .image import GrayImage, blank, from_array, load_image, save_pgm, save_png
from .transform import (
    AffineParams,
    affine,
    augment,
    column_peakedness,
    deskew,
    deslant,
    deslant_with_factor,
    fit_to_canvas,
    median_denoise,
    normalize_to_model,
    projection_variance,
    resize,
    rotate,
    shear,
    standardize,
)


class PreprocessConfig(BaseModel):
    """Steps applied before normalisation; all corrections are opt-in"""

    model_config = ConfigDict(extra="forbid")

    denoise: bool = False
    deskew: bool = False
    max_angle: float = Field(default=15.0, ge=0.0, le=45.0)
    deslant: bool = False


def preprocess(
    img: GrayImage,
    config: PreprocessConfig | None = None,
    target_w: int = 128,
    target_h: int = 32,
) -> GrayImage:
    """denoise → deskew → deslant → fit, pad and standardise"""
    config = config or PreprocessConfig()
    if config.denoise:
        img = median_denoise(img)
    if config.deskew:
        img, _ = deskew(img, config.max_angle)
    if config.deslant:
        img = deslant(img)
    return normalize_to_model(img, target_w, target_h)


__all__ = [
    "AffineParams",
    "GrayImage",
    "PreprocessConfig",
    "affine",
    "augment",
    "blank",
    "column_peakedness",
    "deskew",
    "deslant",
    "deslant_with_factor",
    "fit_to_canvas",
    "from_array",
    "load_image",
    "median_denoise",
    "normalize_to_model",
    "preprocess",
    "projection_variance",
    "resize",
    "rotate",
    "save_pgm",
    "save_png",
    "shear",
    "standardize",
]
