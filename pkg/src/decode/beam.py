"""
Prefix beam search and dictionary-constrained word beam search

Beams carry log masses of paths ending in a blank and in a non-blank. A
beam's ranking score is their log-sum plus the scaled language-model score.
Ties are broken by the labeling itself, so results are deterministic.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from ctc import Label, ProbMatrix
from decode.char_lm import CharLM
from decode.prefix_tree import PrefixTree
from errors import ConfigError

logger = logging.getLogger(__name__)

NEG_INF = -math.inf
DEFAULT_BEAM_WIDTH = 25
DEFAULT_LM_WEIGHT = 0.01


def logadd(a: float, b: float) -> float:
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    high = max(a, b)
    return high + math.log1p(math.exp(-abs(a - b)))


@dataclass
class Beam:
    labeling: Label
    prob_blank: float = NEG_INF
    prob_non_blank: float = NEG_INF
    lm_score: float = 0.0

    @property
    def total(self) -> float:
        return logadd(self.prob_blank, self.prob_non_blank)

    @property
    def score(self) -> float:
        return self.total + self.lm_score


def _rank(beam: Beam) -> tuple[float, Label]:
    return (-beam.score, beam.labeling)


def _check_width(beam_width: int) -> None:
    if beam_width < 1:
        msg = f"beam width must be at least 1, got {beam_width}"
        raise ConfigError(msg)


def _entry(candidates: dict[Label, Beam], labeling: Label, lm_score: float) -> Beam:
    beam = candidates.get(labeling)
    if beam is None:
        beam = Beam(labeling, lm_score=lm_score)
        candidates[labeling] = beam
    return beam


def prefix_search(
    m: ProbMatrix,
    beam_width: int,
    extensions: Callable[[Label], Iterable[int]],
    lm_step: Callable[[Label, int], float] | None = None,
) -> list[Beam]:
    """Run the beam over every frame; returns surviving beams best first"""
    _check_width(beam_width)
    log_probs = m.log_probs()
    blank = m.blank
    beams = [Beam((), prob_blank=0.0)]
    for t in range(m.t_steps):
        row = log_probs[t].tolist()
        candidates: dict[Label, Beam] = {}
        for beam in beams:
            total = beam.total
            same = _entry(candidates, beam.labeling, beam.lm_score)
            same.prob_blank = logadd(same.prob_blank, total + row[blank])
            if beam.labeling:
                last = beam.labeling[-1]
                same.prob_non_blank = logadd(same.prob_non_blank, beam.prob_non_blank + row[last])
            for symbol in extensions(beam.labeling):
                extended = (*beam.labeling, symbol)
                lm_score = beam.lm_score + (lm_step(beam.labeling, symbol) if lm_step else 0.0)
                target = _entry(candidates, extended, lm_score)
                # a repeated symbol only starts a new character after a blank
                source = beam.prob_blank if beam.labeling and symbol == beam.labeling[-1] else total
                target.prob_non_blank = logadd(target.prob_non_blank, source + row[symbol])
        beams = sorted(candidates.values(), key=_rank)[:beam_width]
    return sorted(beams, key=_rank)


def beam_search(m: ProbMatrix, beam_width: int = DEFAULT_BEAM_WIDTH) -> Label:
    symbols = range(m.charset_size)
    beams = prefix_search(m, beam_width, lambda _labeling: symbols)
    return beams[0].labeling


def _current_word(labeling: Label, separator: int | None) -> Label:
    if separator is None or separator not in labeling:
        return labeling
    last = len(labeling) - 1 - labeling[::-1].index(separator)
    return labeling[last + 1 :]


def word_beam_search(
    m: ProbMatrix,
    dictionary: PrefixTree,
    lm: CharLM | None = None,
    beam_width: int = DEFAULT_BEAM_WIDTH,
    lm_weight: float = DEFAULT_LM_WEIGHT,
) -> Label:
    """Beam search whose labelings are always prefixes of dictionary words

    A beam may append a separator only right after a complete word, and only
    beams ending in a complete word (or the empty beam) can be returned.
    """
    if len(dictionary) == 0:
        msg = "word beam search needs a non-empty dictionary"
        raise ConfigError(msg)
    separator = dictionary.separator

    def extensions(labeling: Label) -> list[int]:
        word = _current_word(labeling, separator)
        node = dictionary.node(word)
        if node is None:
            return []
        allowed = sorted(node.children)
        if separator is not None and word and node.is_word:
            allowed.append(separator)
        return allowed

    def lm_step(labeling: Label, symbol: int) -> float:
        previous = labeling[-1] if labeling else None
        return lm_weight * lm.log_prob(previous, symbol)

    beams = prefix_search(m, beam_width, extensions, lm_step if lm is not None else None)

    def final_score(beam: Beam) -> float:
        if lm is None or not beam.labeling:
            return beam.score
        return beam.score + lm_weight * lm.log_prob(beam.labeling[-1], None)

    finished = []
    for beam in beams:
        word = _current_word(beam.labeling, separator)
        if not beam.labeling or (word and word in dictionary):
            finished.append(beam)
    if not finished:
        logger.debug("No beam ended on a complete dictionary word")
        return ()
    return min(finished, key=lambda beam: (-final_score(beam), beam.labeling)).labeling
