"""
Geometric corrections and augmentation

All resampling is bilinear with white fill and results are clipped back
into [0, 1].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from errors import ContractError
from imaging.image import GrayImage

logger = logging.getLogger(__name__)

WHITE = 1.0
DESKEW_STEP = 0.5
MAX_DESKEW_ANGLE = 45.0
DESLANT_FACTORS = np.round(np.arange(-1.0, 1.0 + 1e-9, 0.1), 1)
INK_THRESHOLD = 0.5


def _clip(pixels: np.ndarray) -> GrayImage:
    return GrayImage(np.clip(pixels, 0.0, 1.0))


def rotate(img: GrayImage, angle_deg: float) -> GrayImage:
    """Rotate counter-clockwise about the centre, keeping the canvas size"""
    if angle_deg == 0:
        return img
    rotated = ndimage.rotate(img.pixels, angle_deg, reshape=False, order=1, mode="constant", cval=WHITE)
    return _clip(rotated)


def _affine(img: GrayImage, matrix: np.ndarray, translation: np.ndarray) -> GrayImage:
    """Apply row/col map ``out = matrix @ (in − c) + c + translation`` about the centre c"""
    centre = (np.array(img.shape, dtype=np.float64) - 1.0) / 2.0
    inverse = np.linalg.inv(matrix)
    offset = centre - inverse @ (centre + translation)
    out = ndimage.affine_transform(
        img.pixels, inverse, offset=offset, order=1, mode="constant", cval=WHITE,
    )
    return _clip(out)


def shear(img: GrayImage, factor: float) -> GrayImage:
    """Horizontal shear: a row at distance d below the centre moves by factor·d"""
    if factor == 0:
        return img
    matrix = np.array([[1.0, 0.0], [factor, 1.0]])
    return _affine(img, matrix, np.zeros(2))


def projection_variance(img: GrayImage) -> float:
    """Variance of the per-row ink sums"""
    return float(np.var(img.ink().sum(axis=1)))


def _sweep(max_angle: float, step: float) -> np.ndarray:
    count = int(round(max_angle / step))
    angles = np.arange(-count, count + 1) * step
    # smallest magnitude first so ties favour the least correction
    return angles[np.argsort(np.abs(angles), kind="stable")]


def deskew(img: GrayImage, max_angle_deg: float = 15.0, step: float = DESKEW_STEP) -> tuple[GrayImage, float]:
    """Estimate the text angle from the row profile and rotate it level

    Returns the corrected image and the estimated skew (degrees,
    counter-clockwise positive).
    """
    if not 0 <= max_angle_deg <= MAX_DESKEW_ANGLE:
        msg = f"max_angle_deg must be within [0, {MAX_DESKEW_ANGLE}], got {max_angle_deg}"
        raise ContractError(msg)
    if not img.ink().any():
        return img, 0.0
    best_angle, best_score = 0.0, -np.inf
    for angle in _sweep(max_angle_deg, step):
        score = projection_variance(rotate(img, float(angle)))
        if score > best_score:
            best_angle, best_score = float(angle), score
    logger.debug("Deskew correction %.1f°", best_angle)
    return rotate(img, best_angle), -best_angle


def column_peakedness(img: GrayImage) -> float:
    """Σ of squared ink heights over columns whose ink forms one contiguous run"""
    ink = img.ink() > INK_THRESHOLD
    heights = ink.sum(axis=0)
    rows = np.arange(ink.shape[0])[:, None]
    present = heights > 0
    first = np.where(ink, rows, ink.shape[0]).min(axis=0)
    last = np.where(ink, rows, -1).max(axis=0)
    contiguous = present & (last - first + 1 == heights)
    return float(np.sum(heights[contiguous].astype(np.float64) ** 2))


def deslant_with_factor(img: GrayImage) -> tuple[GrayImage, float]:
    if not (img.ink() > INK_THRESHOLD).any():
        return img, 0.0
    best_factor, best_score = 0.0, column_peakedness(img)
    for factor in DESLANT_FACTORS[np.argsort(np.abs(DESLANT_FACTORS), kind="stable")]:
        if factor == 0:
            continue
        score = column_peakedness(shear(img, float(factor)))
        if score > best_score:
            best_factor, best_score = float(factor), score
    return shear(img, best_factor), best_factor


def deslant(img: GrayImage) -> GrayImage:
    """Upright cursive strokes by the shear that maximises column peakedness"""
    return deslant_with_factor(img)[0]


def resize(img: GrayImage, width: int, height: int) -> GrayImage:
    if (width, height) == (img.width, img.height):
        return img
    source = Image.fromarray(img.pixels.astype(np.float32))
    resized = source.resize((width, height), Image.Resampling.BILINEAR)
    return _clip(np.asarray(resized, dtype=np.float64))


def fit_to_canvas(img: GrayImage, target_w: int, target_h: int) -> GrayImage:
    """Aspect-preserving scale into a white target_w×target_h canvas, top-left aligned"""
    factor = min(target_w / img.width, target_h / img.height)
    width = min(target_w, max(1, round(img.width * factor)))
    height = min(target_h, max(1, round(img.height * factor)))
    canvas = np.ones((target_h, target_w))
    canvas[:height, :width] = resize(img, width, height).pixels
    return GrayImage(canvas)


def standardize(img: GrayImage) -> GrayImage:
    pixels = img.pixels
    std = pixels.std()
    return GrayImage((pixels - pixels.mean()) / (std if std > 0 else 1.0), standardized=True)


def normalize_to_model(img: GrayImage, target_w: int = 128, target_h: int = 32) -> GrayImage:
    return standardize(fit_to_canvas(img, target_w, target_h))


def median_denoise(img: GrayImage, size: int = 3) -> GrayImage:
    return GrayImage(ndimage.median_filter(img.pixels, size=size, mode="nearest"))


@dataclass(frozen=True)
class AffineParams:
    scale_x: float = 1.0
    scale_y: float = 1.0
    shear: float = 0.0
    shift_x: float = 0.0
    shift_y: float = 0.0

    @property
    def is_identity(self) -> bool:
        return self == AffineParams()

    @classmethod
    def draw(cls, rng: np.random.Generator) -> AffineParams:
        return cls(
            scale_x=float(rng.uniform(0.75, 1.25)),
            scale_y=float(rng.uniform(0.9, 1.1)),
            shear=float(rng.uniform(-0.3, 0.3)),
            shift_x=float(rng.uniform(-2.0, 2.0)),
            shift_y=float(rng.uniform(-2.0, 2.0)),
        )


def affine(img: GrayImage, params: AffineParams) -> GrayImage:
    if params.is_identity:
        return img
    matrix = np.array([[params.scale_y, 0.0], [params.shear, params.scale_x]])
    return _affine(img, matrix, np.array([params.shift_y, params.shift_x]))


def augment(img: GrayImage, seed: int | np.random.SeedSequence) -> GrayImage:
    """Random stretch, shear and shift; the same seed gives the same image"""
    return affine(img, AffineParams.draw(np.random.default_rng(seed)))
