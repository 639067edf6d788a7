"""
Projection-profile segmentation

Rows (or columns) whose ink sum falls below ``threshold`` × the largest sum
are gaps. Runs of ink separated by at least ``min_gap`` gap positions are
kept apart; shorter gaps are bridged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import ContractError
from imaging import GrayImage

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.02


@dataclass(frozen=True)
class Box:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1 or self.x < 0 or self.y < 0:
            msg = f"Box needs non-negative origin and positive size, got {self}"
            raise ContractError(msg)

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    def shifted(self, dx: int, dy: int) -> Box:
        return Box(self.x + dx, self.y + dy, self.w, self.h)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)


class SegmentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    min_gap_rows: int = Field(default=3, ge=1)
    min_gap_cols: int = Field(default=6, ge=1)
    threshold: float = Field(default=DEFAULT_THRESHOLD, gt=0.0, lt=1.0)


@dataclass(frozen=True)
class LineSegment:
    box: Box
    words: tuple[Box, ...]


def iou(a: Box, b: Box) -> float:
    width = min(a.right, b.right) - max(a.x, b.x)
    height = min(a.bottom, b.bottom) - max(a.y, b.y)
    if width <= 0 or height <= 0:
        return 0.0
    inter = width * height
    return inter / (a.area + b.area - inter)


def ink_runs(profile: np.ndarray, min_gap: int, threshold: float = DEFAULT_THRESHOLD) -> list[tuple[int, int]]:
    """Half-open [start, end) runs of above-threshold positions"""
    if not 0.0 < threshold < 1.0:
        msg = f"threshold must be in (0, 1), got {threshold}"
        raise ContractError(msg)
    peak = profile.max() if profile.size else 0.0
    if peak <= 0:
        return []
    inked = profile >= threshold * peak
    runs: list[tuple[int, int]] = []
    start = None
    for index, flag in enumerate(inked):
        if flag and start is None:
            start = index
        elif not flag and start is not None:
            runs.append((start, index))
            start = None
    if start is not None:
        runs.append((start, len(inked)))

    merged: list[tuple[int, int]] = []
    for run in runs:
        if merged and run[0] - merged[-1][1] < min_gap:
            merged[-1] = (merged[-1][0], run[1])
        else:
            merged.append(run)
    return merged


def _tight(ink: np.ndarray, x0: int, x1: int, y0: int, y1: int) -> Box | None:
    """Bounding box of the ink inside [x0, x1) × [y0, y1)"""
    region = ink[y0:y1, x0:x1] > 0
    if not region.any():
        return None
    rows = np.flatnonzero(region.any(axis=1))
    cols = np.flatnonzero(region.any(axis=0))
    return Box(
        x=x0 + int(cols[0]), y=y0 + int(rows[0]),
        w=int(cols[-1] - cols[0] + 1), h=int(rows[-1] - rows[0] + 1),
    )


def segment_lines(img: GrayImage, min_gap_rows: int = 3, threshold: float = DEFAULT_THRESHOLD) -> list[Box]:
    """Line boxes from the horizontal projection, top to bottom"""
    ink = img.ink()
    boxes = []
    for start, end in ink_runs(ink.sum(axis=1), min_gap_rows, threshold):
        box = _tight(ink, 0, img.width, start, end)
        if box is not None:
            boxes.append(box)
    return boxes


def segment_words(line: GrayImage, min_gap_cols: int = 6, threshold: float = DEFAULT_THRESHOLD) -> list[Box]:
    """Word boxes from the vertical projection of one line, left to right"""
    ink = line.ink()
    boxes = []
    for start, end in ink_runs(ink.sum(axis=0), min_gap_cols, threshold):
        box = _tight(ink, start, end, 0, line.height)
        if box is not None:
            boxes.append(box)
    return boxes


def segment_page(img: GrayImage, config: SegmentConfig | None = None) -> list[LineSegment]:
    """Lines, then the words inside each line, all in page coordinates"""
    config = config or SegmentConfig()
    lines = []
    for line_box in segment_lines(img, config.min_gap_rows, config.threshold):
        crop = img.crop(*line_box.as_tuple())
        words = tuple(
            word.shifted(line_box.x, line_box.y)
            for word in segment_words(crop, config.min_gap_cols, config.threshold)
        )
        lines.append(LineSegment(line_box, words))
    logger.debug("Segmented %d lines, %d words", len(lines), sum(len(line.words) for line in lines))
    return lines
