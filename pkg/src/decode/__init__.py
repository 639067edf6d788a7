"""
CTC decoders

Best path, prefix beam search and word beam search, plus a dispatcher that
picks one by name.
"""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from ctc import Label, ProbMatrix
from errors import ConfigError

from .beam import DEFAULT_BEAM_WIDTH, DEFAULT_LM_WEIGHT, Beam, beam_search, logadd, prefix_search, word_beam_search
from .best_path import best_path, labeling_probability, path_score
from .char_lm import CharLM
from .prefix_tree import PrefixTree, TrieNode


class DecoderName(str, Enum):
    BEST_PATH = "bestpath"
    BEAM_SEARCH = "beamsearch"
    WORD_BEAM_SEARCH = "wordbeamsearch"
    WORD_BEAM_SEARCH_LM = "wordbeamsearch+lm"

    @property
    def needs_dictionary(self) -> bool:
        return self in (DecoderName.WORD_BEAM_SEARCH, DecoderName.WORD_BEAM_SEARCH_LM)


class DecoderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: DecoderName = DecoderName.BEST_PATH
    beam_width: int = Field(default=DEFAULT_BEAM_WIDTH, ge=1)
    lm_weight: float = Field(default=DEFAULT_LM_WEIGHT, ge=0.0)


def decode(
    m: ProbMatrix,
    config: DecoderConfig | None = None,
    dictionary: PrefixTree | None = None,
    lm: CharLM | None = None,
) -> Label:
    config = config or DecoderConfig()
    if config.name == DecoderName.BEST_PATH:
        return best_path(m)
    if config.name == DecoderName.BEAM_SEARCH:
        return beam_search(m, config.beam_width)
    if dictionary is None:
        msg = f"decoder {config.name.value} needs a dictionary"
        raise ConfigError(msg)
    if config.name == DecoderName.WORD_BEAM_SEARCH_LM:
        if lm is None:
            msg = "decoder wordbeamsearch+lm needs a character language model"
            raise ConfigError(msg)
        return word_beam_search(m, dictionary, lm, config.beam_width, config.lm_weight)
    return word_beam_search(m, dictionary, None, config.beam_width)


__all__ = [
    "DEFAULT_BEAM_WIDTH",
    "DEFAULT_LM_WEIGHT",
    "Beam",
    "CharLM",
    "DecoderConfig",
    "DecoderName",
    "PrefixTree",
    "TrieNode",
    "beam_search",
    "best_path",
    "decode",
    "labeling_probability",
    "logadd",
    "path_score",
    "prefix_search",
    "word_beam_search",
]
