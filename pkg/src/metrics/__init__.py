"""
Recognition metrics: CER, WER, WAR, CAR and per-character accuracy
"""

from .edit_distance import AlignedPair, EditOps, Op, WordEditOps, align, distance, levenshtein, normalize, wer, words
from .report import REPORT_COLUMNS, Averaging, CharStats, EvalReport, corpus_eval

__all__ = [
    "REPORT_COLUMNS",
    "AlignedPair",
    "Averaging",
    "CharStats",
    "EditOps",
    "EvalReport",
    "Op",
    "WordEditOps",
    "align",
    "corpus_eval",
    "distance",
    "levenshtein",
    "normalize",
    "wer",
    "words",
]
