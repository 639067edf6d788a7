"""
Corpus-level evaluation report
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import pandas as pd

from errors import ContractError
from metrics.edit_distance import Op, align, levenshtein, normalize, wer
from utils import write_csv

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["section", "key", "value", "count"]


class Averaging(str, Enum):
    MICRO = "micro"
    MACRO = "macro"


@dataclass(frozen=True)
class CharStats:
    count: int
    correct: int

    @property
    def accuracy(self) -> float | None:
        return 100.0 * self.correct / self.count if self.count else None


@dataclass(frozen=True)
class EvalReport:
    """Error and accuracy rates in percent

    CER and WER are capped at 100 so that CAR = 100 − CER stays within
    [0, 100]. CAR is always paired with the micro CER, so a macro report
    differs from the micro one in its CER row only. ``accuracy`` is the word
    accuracy rate under its other name.
    """

    cer: float
    wer: float
    war: float
    car: float
    sample_count: int
    averaging: Averaging = Averaging.MICRO
    char_stats: dict[str, CharStats] = field(default_factory=dict)

    @property
    def accuracy(self) -> float:
        return self.war

    @property
    def per_char(self) -> dict[str, float | None]:
        return {symbol: stats.accuracy for symbol, stats in self.char_stats.items()}

    def to_frame(self) -> pd.DataFrame:
        """Overall rows first, then one row per character"""
        rows = [
            ("overall", f"cer_{self.averaging.value}", self.cer, self.sample_count),
            ("overall", "wer", self.wer, self.sample_count),
            ("overall", "war", self.war, self.sample_count),
            ("overall", "accuracy", self.accuracy, self.sample_count),
            ("overall", "car", self.car, self.sample_count),
        ]
        rows.extend(
            ("char", symbol, stats.accuracy, stats.count) for symbol, stats in self.char_stats.items()
        )
        return pd.DataFrame(rows, columns=REPORT_COLUMNS)

    def write_csv(self, path: str | Path) -> bool:
        """Write the report table; False if the file could not be written"""
        written = write_csv(self.to_frame(), path)
        if written:
            logger.info("Wrote evaluation report to %s", path)
        return written


def _percent(errors: float, total: float) -> float:
    return min(100.0, 100.0 * errors / total)


def corpus_eval(
    pairs: Sequence[tuple[str, str]],
    macro: bool = False,
    symbols: Iterable[str] | None = None,
) -> EvalReport:
    """Evaluate (prediction, ground_truth) pairs

    ``symbols`` lists characters that must appear in the per-character
    breakdown even when absent from the ground truth.
    """
    if not pairs:
        msg = "corpus_eval needs at least one (prediction, ground truth) pair"
        raise ContractError(msg)

    char_errors = char_total = 0
    word_errors = word_total = 0
    per_pair_cer = []
    exact = 0
    counts: dict[str, list[int]] = {symbol: [0, 0] for symbol in (symbols or ())}
    for prediction, truth in pairs:
        prediction, truth = normalize(prediction), normalize(truth)
        ops = levenshtein(truth, prediction)
        char_errors += ops.distance
        char_total += len(truth)
        per_pair_cer.append(ops.cer)
        word_ops = wer(truth, prediction)
        word_errors += word_ops.distance
        word_total += word_ops.n
        exact += prediction == truth
        for pair in align(truth, prediction):
            if pair.reference is None:
                continue
            entry = counts.setdefault(pair.reference, [0, 0])
            entry[0] += 1
            entry[1] += pair.op == Op.MATCH

    micro_cer = _percent(char_errors, max(1, char_total))
    cer = min(100.0, 100.0 * sum(per_pair_cer) / len(per_pair_cer)) if macro else micro_cer
    report = EvalReport(
        cer=cer,
        wer=_percent(word_errors, word_total),
        war=100.0 * exact / len(pairs),
        # CAR always pairs with the micro CER; macro only relabels the CER row
        car=100.0 - micro_cer,
        sample_count=len(pairs),
        averaging=Averaging.MACRO if macro else Averaging.MICRO,
        char_stats={symbol: CharStats(total, correct) for symbol, (total, correct) in counts.items()},
    )
    logger.debug(
        "Evaluated %d samples: CER %.2f%%, WER %.2f%%, WAR %.2f%%",
        report.sample_count, report.cer, report.wer, report.war,
    )
    return report
