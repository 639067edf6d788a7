"""
Grayscale images and file I/O

Pixels are row-major floats with 0 = black ink and 1 = white paper.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from errors import ContractError, ShapeError

logger = logging.getLogger(__name__)

MAXVAL = 255


@dataclass(frozen=True)
class GrayImage:
    """``standardized`` images are zero-mean model inputs and may leave [0, 1]"""

    pixels: np.ndarray
    standardized: bool = False

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2 or 0 in pixels.shape:  # noqa: PLR2004
            msg = f"GrayImage needs a non-empty H×W array, got shape {pixels.shape}"
            raise ShapeError(msg)
        if not self.standardized and (pixels.min() < 0.0 or pixels.max() > 1.0):
            msg = f"pixels must lie in [0, 1], got range [{pixels.min()}, {pixels.max()}]"
            raise ContractError(msg)
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def ink(self) -> np.ndarray:
        """Ink mass per pixel (1 − brightness)"""
        return 1.0 - self.pixels

    def crop(self, x: int, y: int, w: int, h: int) -> GrayImage:
        return GrayImage(self.pixels[y : y + h, x : x + w].copy(), self.standardized)

    def to_uint8(self) -> np.ndarray:
        return np.rint(np.clip(self.pixels, 0.0, 1.0) * MAXVAL).astype(np.uint8)


def from_array(array: np.ndarray) -> GrayImage:
    """Wrap an 8-bit array (0..255) or a float array in [0, 1]"""
    array = np.asarray(array)
    if array.dtype == np.uint8:
        return GrayImage(array.astype(np.float64) / MAXVAL)
    return GrayImage(np.clip(array.astype(np.float64), 0.0, 1.0))


def blank(width: int, height: int) -> GrayImage:
    return GrayImage(np.ones((height, width)))


def load_image(path: str | Path) -> GrayImage:
    """Read a PGM or PNG file as grayscale"""
    path = Path(path)
    try:
        with Image.open(path) as handle:
            array = np.asarray(handle.convert("L"), dtype=np.uint8)
    except (OSError, UnidentifiedImageError) as err:
        msg = f"Cannot read image {path}: {err}"
        raise ContractError(msg) from err
    logger.debug("Loaded %s (%d×%d)", path, array.shape[1], array.shape[0])
    return from_array(array)


def save_pgm(img: GrayImage, path: str | Path) -> None:
    """Write a binary PGM (P5, maxval 255)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(img.to_uint8()).save(path, format="PPM")


def save_png(img: GrayImage, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(img.to_uint8()).save(path, format="PNG")
