"""
Embedded single-stroke font for Russian and Kazakh letters

Glyphs are polylines in x-height units: y = 0 is the top of the lowercase
body, y = 1 the baseline, ascenders reach −0.5 and descenders 1.5.
Capitals reuse the lowercase drawing stretched to cap height.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from errors import EncodingError
from imaging import GrayImage, from_array

logger = logging.getLogger(__name__)

Stroke = tuple[tuple[float, float], ...]

ASCENT = 0.5
DESCENT = 0.5
STROKE_WIDTH = 2
LETTER_GAP = 0.15
SPACE_ADVANCE = 0.6
CAPITAL_STRETCH = 1.5
CAPITAL_WIDEN = 1.15


@dataclass(frozen=True)
class Glyph:
    advance: float
    strokes: tuple[Stroke, ...]


def _g(advance: float, *strokes: list[tuple[float, float]]) -> Glyph:
    return Glyph(advance, tuple(tuple(s) for s in strokes))


_O = [(0.35, 0), (0.1, 0.2), (0.1, 0.8), (0.35, 1), (0.6, 0.8), (0.6, 0.2), (0.35, 0)]
_E = [(0.1, 0.5), (0.6, 0.5), (0.55, 0.1), (0.35, 0), (0.1, 0.15), (0.05, 0.6), (0.2, 0.95), (0.6, 0.9)]
_I = [(0.1, 0), (0.1, 1), (0.6, 0), (0.6, 1)]
_N = ([(0.1, 0), (0.1, 1)], [(0.6, 0), (0.6, 1)], [(0.1, 0.5), (0.6, 0.5)])
_K = ([(0.1, 0), (0.1, 1)], [(0.6, 0), (0.1, 0.5), (0.6, 1)])
_SHA = ([(0.1, 0), (0.1, 1), (0.85, 1), (0.85, 0)], [(0.47, 0), (0.47, 1)])
_SOFT = [(0.1, 0), (0.1, 1), (0.45, 1), (0.6, 0.8), (0.45, 0.5), (0.1, 0.5)]
_V = [(0.05, 0), (0.35, 0.6), (0.65, 0)]

GLYPHS: dict[str, Glyph] = {
    "а": _g(0.7, [(0.1, 0.15), (0.3, 0), (0.6, 0.05), (0.6, 1)], [(0.6, 0.5), (0.2, 0.5), (0.05, 0.75), (0.2, 1), (0.6, 0.85)]),
    "б": _g(0.7, [(0.6, -0.5), (0.2, -0.4), (0.1, 0), (0.1, 0.8), (0.3, 1), (0.55, 0.9), (0.6, 0.6), (0.4, 0.35), (0.1, 0.4)]),
    "в": _g(0.7, [(0.1, 0), (0.1, 1), (0.45, 1), (0.6, 0.8), (0.45, 0.5), (0.1, 0.5)], [(0.1, 0), (0.4, 0), (0.5, 0.25), (0.4, 0.5)]),
    "г": _g(0.65, [(0.1, 1), (0.1, 0), (0.6, 0)]),
    "д": _g(0.75, [(0.0, 1.3), (0.0, 1), (0.7, 1), (0.7, 1.3)], [(0.1, 1), (0.25, 0), (0.55, 0), (0.6, 1)]),
    "е": _g(0.7, _E),
    "ё": _g(0.7, _E, [(0.2, -0.3), (0.22, -0.2)], [(0.45, -0.3), (0.47, -0.2)]),
    "ж": _g(0.95, [(0.45, 0), (0.45, 1)], [(0, 0), (0.45, 0.5), (0, 1)], [(0.9, 0), (0.45, 0.5), (0.9, 1)]),
    "з": _g(0.65, [(0.1, 0.1), (0.3, 0), (0.5, 0.1), (0.5, 0.35), (0.25, 0.5), (0.55, 0.7), (0.5, 0.95), (0.3, 1), (0.05, 0.9)]),
    "и": _g(0.7, _I),
    "й": _g(0.7, _I, [(0.2, -0.3), (0.35, -0.15), (0.5, -0.3)]),
    "к": _g(0.7, *_K),
    "л": _g(0.7, [(0, 1), (0.2, 0.9), (0.3, 0), (0.6, 0), (0.6, 1)]),
    "м": _g(0.9, [(0.1, 1), (0.1, 0), (0.45, 0.6), (0.8, 0), (0.8, 1)]),
    "н": _g(0.7, *_N),
    "о": _g(0.7, _O),
    "п": _g(0.7, [(0.1, 1), (0.1, 0), (0.6, 0), (0.6, 1)]),
    "р": _g(0.7, [(0.1, 1.5), (0.1, 0), (0.5, 0), (0.6, 0.25), (0.5, 0.5), (0.1, 0.5)]),
    "с": _g(0.7, [(0.6, 0.1), (0.35, 0), (0.1, 0.2), (0.1, 0.8), (0.35, 1), (0.6, 0.9)]),
    "т": _g(0.7, [(0.05, 0), (0.65, 0)], [(0.35, 0), (0.35, 1)]),
    "у": _g(0.7, [(0.05, 0), (0.35, 0.9)], [(0.65, 0), (0.3, 1.3), (0.1, 1.5)]),
    "ф": _g(0.85, [(0.4, -0.5), (0.4, 1.5)], [(0.4, 0.1), (0.1, 0.2), (0.05, 0.5), (0.1, 0.8), (0.4, 0.9), (0.7, 0.8), (0.75, 0.5), (0.7, 0.2), (0.4, 0.1)]),
    "х": _g(0.7, [(0.05, 0), (0.65, 1)], [(0.65, 0), (0.05, 1)]),
    "ц": _g(0.8, [(0.1, 0), (0.1, 1), (0.65, 1), (0.65, 0)], [(0.65, 1), (0.75, 1.3)]),
    "ч": _g(0.7, [(0.1, 0), (0.1, 0.4), (0.3, 0.55), (0.6, 0.5)], [(0.6, 0), (0.6, 1)]),
    "ш": _g(0.95, *_SHA),
    "щ": _g(1.0, *_SHA, [(0.85, 1), (0.95, 1.3)]),
    "ъ": _g(0.75, [(0, 0), (0.2, 0), (0.2, 1), (0.55, 1), (0.7, 0.8), (0.55, 0.5), (0.2, 0.5)]),
    "ы": _g(0.85, [(0.1, 0), (0.1, 1), (0.4, 1), (0.55, 0.8), (0.4, 0.5), (0.1, 0.5)], [(0.75, 0), (0.75, 1)]),
    "ь": _g(0.7, _SOFT),
    "э": _g(0.7, [(0.1, 0.1), (0.35, 0), (0.6, 0.2), (0.6, 0.8), (0.35, 1), (0.1, 0.9)], [(0.25, 0.5), (0.6, 0.5)]),
    "ю": _g(0.9, [(0.1, 0), (0.1, 1)], [(0.1, 0.5), (0.3, 0.5)], [(0.55, 0), (0.3, 0.2), (0.3, 0.8), (0.55, 1), (0.8, 0.8), (0.8, 0.2), (0.55, 0)]),
    "я": _g(0.7, [(0.6, 1), (0.6, 0), (0.25, 0), (0.1, 0.25), (0.25, 0.5), (0.6, 0.5)], [(0.3, 0.5), (0.05, 1)]),
    "ә": _g(0.7, [(0.05, 0.1), (0.3, 0), (0.55, 0.15), (0.6, 0.5), (0.5, 0.85), (0.3, 1), (0.08, 0.85), (0.05, 0.5), (0.6, 0.5)]),
    "ғ": _g(0.7, [(0.15, 1), (0.15, 0), (0.65, 0)], [(0, 0.5), (0.35, 0.5)]),
    "қ": _g(0.75, *_K, [(0.6, 1), (0.7, 1.3)]),
    "ң": _g(0.75, *_N, [(0.6, 1), (0.7, 1.3)]),
    "ө": _g(0.7, _O, [(0.1, 0.5), (0.6, 0.5)]),
    "ұ": _g(0.7, _V, [(0.35, 0.6), (0.35, 1.5)], [(0.15, 1.05), (0.55, 1.05)]),
    "ү": _g(0.7, _V, [(0.35, 0.6), (0.35, 1.5)]),
    "һ": _g(0.7, [(0.1, -0.5), (0.1, 1)], [(0.1, 0.3), (0.35, 0), (0.6, 0.2), (0.6, 1)]),
    "і": _g(0.3, [(0.15, 0), (0.15, 1)], [(0.15, -0.35), (0.15, -0.25)]),
}


def glyph_for(char: str) -> Glyph | None:
    """Lowercase glyphs directly; capitals stretched from their lowercase form"""
    if char in GLYPHS:
        return GLYPHS[char]
    lower = char.lower()
    if lower == char or lower not in GLYPHS:
        return None
    base = GLYPHS[lower]
    strokes = tuple(
        tuple((x * CAPITAL_WIDEN, y * CAPITAL_STRETCH - ASCENT) for x, y in stroke) for stroke in base.strokes
    )
    return Glyph(base.advance * CAPITAL_WIDEN, strokes)


def supported(text: str) -> bool:
    return all(ch == " " or glyph_for(ch) is not None for ch in text)


def render(
    text: str,
    unit: int = 16,
    margin: int = 4,
    rng: np.random.Generator | None = None,
    jitter: float = 0.04,
) -> GrayImage:
    """Draw ``text`` with 2-px strokes; ``rng`` perturbs points and spacing"""
    layout: list[tuple[float, Glyph | None]] = []
    cursor = 0.0
    for position, ch in enumerate(text):
        if ch == " ":
            layout.append((cursor, None))
            cursor += SPACE_ADVANCE
            continue
        glyph = glyph_for(ch)
        if glyph is None:
            raise EncodingError(ch, position, "the stroke font")
        layout.append((cursor, glyph))
        gap = LETTER_GAP
        if rng is not None:
            gap += float(rng.uniform(-0.05, 0.1))
        cursor += glyph.advance + gap

    width = max(1, int(np.ceil(cursor * unit)) + 2 * margin)
    height = int(np.ceil((ASCENT + 1 + DESCENT) * unit)) + 2 * margin
    canvas = Image.new("L", (width, height), 255)
    draw = ImageDraw.Draw(canvas)
    for origin, glyph in layout:
        if glyph is None:
            continue
        for stroke in glyph.strokes:
            points = np.array(stroke, dtype=np.float64)
            if rng is not None:
                points = points + rng.normal(0.0, jitter, size=points.shape)
            xy = [
                (margin + (origin + x) * unit, margin + (y + ASCENT) * unit) for x, y in points.tolist()
            ]
            if len(xy) == 1:
                xy = xy * 2
            draw.line(xy, fill=0, width=STROKE_WIDTH, joint="curve")
    return from_array(np.asarray(canvas, dtype=np.uint8))
