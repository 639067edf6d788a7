"""
Text block segmentation into lines and words
"""

from .projection import (
    DEFAULT_THRESHOLD,
    Box,
    LineSegment,
    SegmentConfig,
    ink_runs,
    iou,
    segment_lines,
    segment_page,
    segment_words,
)

__all__ = [
    "DEFAULT_THRESHOLD",
    "Box",
    "LineSegment",
    "SegmentConfig",
    "ink_runs",
    "iou",
    "segment_lines",
    "segment_page",
    "segment_words",
]
