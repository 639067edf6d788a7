"""
Levenshtein distance with an explicit edit script

Distances are computed from reference to hypothesis: an insertion is an
extra hypothesis symbol, a deletion a reference symbol the hypothesis lost.
When several minimal scripts exist the backtrace prefers, in order, a
diagonal step (match or substitution), a deletion, then an insertion.
"""

from __future__ import annotations

import unicodedata
from collections.abc import Hashable, Sequence
from dataclasses import dataclass
from enum import Enum


class Op(str, Enum):
    MATCH = "match"
    SUBSTITUTE = "substitute"
    DELETE = "delete"
    INSERT = "insert"


@dataclass(frozen=True)
class AlignedPair:
    op: Op
    reference: Hashable | None
    hypothesis: Hashable | None


@dataclass(frozen=True)
class EditOps:
    """Character-level edit counts; ``n`` is the reference length (at least 1)"""

    substitutions: int
    insertions: int
    deletions: int
    n: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def cer(self) -> float:
        return self.distance / self.n


@dataclass(frozen=True)
class WordEditOps:
    substitutions: int
    insertions: int
    deletions: int
    n: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def wer(self) -> float:
        return self.distance / self.n


def _table(reference: Sequence[Hashable], hypothesis: Sequence[Hashable]) -> list[list[int]]:
    rows, cols = len(reference) + 1, len(hypothesis) + 1
    cost = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        cost[i][0] = i
    for j in range(cols):
        cost[0][j] = j
    for i in range(1, rows):
        ref = reference[i - 1]
        above, current = cost[i - 1], cost[i]
        for j in range(1, cols):
            diagonal = above[j - 1] + (ref != hypothesis[j - 1])
            current[j] = min(diagonal, above[j] + 1, current[j - 1] + 1)
    return cost


def align(reference: Sequence[Hashable], hypothesis: Sequence[Hashable]) -> list[AlignedPair]:
    """One canonical minimal alignment, in reference order"""
    cost = _table(reference, hypothesis)
    i, j = len(reference), len(hypothesis)
    pairs: list[AlignedPair] = []
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            same = reference[i - 1] == hypothesis[j - 1]
            if cost[i][j] == cost[i - 1][j - 1] + (not same):
                op = Op.MATCH if same else Op.SUBSTITUTE
                pairs.append(AlignedPair(op, reference[i - 1], hypothesis[j - 1]))
                i, j = i - 1, j - 1
                continue
        if i > 0 and cost[i][j] == cost[i - 1][j] + 1:
            pairs.append(AlignedPair(Op.DELETE, reference[i - 1], None))
            i -= 1
            continue
        pairs.append(AlignedPair(Op.INSERT, None, hypothesis[j - 1]))
        j -= 1
    pairs.reverse()
    return pairs


def distance(reference: Sequence[Hashable], hypothesis: Sequence[Hashable]) -> int:
    return _table(reference, hypothesis)[-1][-1]


def _counts(pairs: list[AlignedPair]) -> tuple[int, int, int]:
    subs = sum(1 for p in pairs if p.op == Op.SUBSTITUTE)
    ins = sum(1 for p in pairs if p.op == Op.INSERT)
    dels = sum(1 for p in pairs if p.op == Op.DELETE)
    return subs, ins, dels


def normalize(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def levenshtein(reference: str, hypothesis: str) -> EditOps:
    reference, hypothesis = normalize(reference), normalize(hypothesis)
    subs, ins, dels = _counts(align(reference, hypothesis))
    return EditOps(subs, ins, dels, max(1, len(reference)))


def words(text: str) -> list[str]:
    return [token for token in normalize(text).split(" ") if token]


def wer(reference: str, hypothesis: str) -> WordEditOps:
    ref_words, hyp_words = words(reference), words(hypothesis)
    subs, ins, dels = _counts(align(ref_words, hyp_words))
    return WordEditOps(subs, ins, dels, max(1, len(ref_words)))
