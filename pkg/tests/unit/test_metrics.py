#!/usr/bin/env python3
"""
Edit distance and evaluation report tests
"""

import itertools
from functools import lru_cache

import pandas as pd
import pytest

from errors import ContractError
from metrics import Averaging, Op, align, corpus_eval, distance, levenshtein, wer


@lru_cache(maxsize=None)
def recursive_distance(a, b):
    """Textbook recursive Levenshtein"""
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        recursive_distance(a[1:], b) + 1,
        recursive_distance(a, b[1:]) + 1,
        recursive_distance(a[1:], b[1:]) + (a[0] != b[0]),
    )


def short_strings(alphabet="абв", max_len=4):
    for n in range(max_len + 1):
        for chars in itertools.product(alphabet, repeat=n):
            yield "".join(chars)


@pytest.mark.unit
class TestLevenshtein:
    """Character edit counts"""

    def test_identity(self):
        """Test identical strings have no edits"""
        ops = levenshtein("абвгд", "абвгд")
        assert (ops.substitutions, ops.insertions, ops.deletions, ops.cer) == (0, 0, 0, 0.0)

    def test_single_substitution(self):
        """Test one changed letter is one substitution"""
        ops = levenshtein("казах", "казак")
        assert ops.substitutions == 1
        assert ops.cer == pytest.approx(0.2)

    def test_kitten_sitting(self):
        """Test the classic pair: two substitutions, one insertion"""
        ops = levenshtein("kitten", "sitting")
        assert (ops.substitutions, ops.insertions, ops.deletions) == (2, 1, 0)
        assert ops.cer == pytest.approx(0.5)

    def test_empty_reference_guard(self):
        """Test an empty reference uses N = 1"""
        ops = levenshtein("", "аб")
        assert (ops.insertions, ops.n) == (2, 1)

    def test_against_recursive_oracle(self):
        """Test all string pairs up to length 4 over three letters"""
        strings = list(short_strings())
        for a in strings[::3]:
            for b in strings[::2]:
                assert distance(a, b) == recursive_distance(a, b)
                assert levenshtein(a, b).distance == recursive_distance(a, b)

    def test_symmetry_and_bounds(self):
        """Test dist(a, b) = dist(b, a) and 0 ≤ dist ≤ max length"""
        strings = list(short_strings(max_len=3))
        for a, b in itertools.product(strings[::4], repeat=2):
            d = distance(a, b)
            assert d == distance(b, a)
            assert 0 <= d <= max(len(a), len(b))
            assert (d == 0) == (a == b)

    def test_triangle_inequality(self):
        """Test the triangle inequality on sampled triples"""
        strings = list(short_strings(max_len=3))[::5]
        for a, b, c in itertools.product(strings, repeat=3):
            assert distance(a, c) <= distance(a, b) + distance(b, c)

    def test_nfc_normalisation(self):
        """Test decomposed й equals precomposed й"""
        assert levenshtein("\u0439", "\u0438\u0306").distance == 0


@pytest.mark.unit
class TestAlignment:
    """Canonical alignment"""

    def test_prefers_substitution(self):
        """Test equal-cost scripts resolve to a substitution"""
        pairs = align("а", "б")
        assert [p.op for p in pairs] == [Op.SUBSTITUTE]

    def test_deletion_and_insertion(self):
        """Test a lost reference symbol is a deletion"""
        assert [p.op for p in align("аб", "а")] == [Op.MATCH, Op.DELETE]
        assert [p.op for p in align("а", "аб")] == [Op.MATCH, Op.INSERT]


@pytest.mark.unit
class TestWordErrors:
    """Word-level edits"""

    def test_word_substitution(self):
        """Test one wrong word out of two"""
        ops = wer("улица абая", "улица абал")
        assert ops.substitutions == 1
        assert ops.wer == pytest.approx(0.5)

    def test_missing_word(self):
        """Test a dropped word is a deletion"""
        assert wer("дом 12 кв", "дом кв").deletions == 1


@pytest.mark.unit
class TestCorpusEval:
    """Corpus report"""

    def test_perfect_predictions(self):
        """Test identical predictions give 0/0/100/100"""
        report = corpus_eval([("алматы", "алматы"), ("астана", "астана")])
        assert (report.cer, report.wer, report.war, report.car) == (0.0, 0.0, 100.0, 100.0)

    def test_single_substitution(self):
        """Test one substitution in six letters"""
        report = corpus_eval([("алмата", "алматы")])
        assert report.cer == pytest.approx(100 / 6)
        assert report.war == 0.0
        assert report.car + report.cer == pytest.approx(100.0)

    def test_micro_is_length_weighted(self):
        """Test micro CER is the length-weighted mean of per-pair CERs"""
        pairs = [("аб", "абвг"), ("абв", "абв"), ("", "аб"), ("ббб", "ааа")]
        per_pair = [levenshtein(t, p) for p, t in pairs]
        weighted = sum(ops.cer * len(t) for ops, (_, t) in zip(per_pair, pairs)) / sum(len(t) for _, t in pairs)
        assert corpus_eval(pairs).cer == pytest.approx(100 * weighted)

    def test_macro_flag(self):
        """Test macro CER averages per-pair rates and is labelled"""
        pairs = [("а", "аааа"), ("б", "а")]
        report = corpus_eval(pairs, macro=True)
        assert report.cer == pytest.approx(100 * (0.75 + 1.0) / 2)
        assert report.averaging == Averaging.MACRO
        assert corpus_eval(pairs).cer == pytest.approx(100 * 4 / 5)

    def test_macro_changes_only_cer_row(self):
        """Test the macro flag relabels and changes the CER row and leaves every other row alone"""
        pairs = [("а", "аааа"), ("б", "а"), ("аб", "аб")]
        micro = corpus_eval(pairs, symbols="аб").to_frame()
        macro = corpus_eval(pairs, macro=True, symbols="аб").to_frame()
        assert (micro.iloc[0]["key"], macro.iloc[0]["key"]) == ("cer_micro", "cer_macro")
        assert micro.iloc[0]["value"] != pytest.approx(macro.iloc[0]["value"])
        pd.testing.assert_frame_equal(micro.iloc[1:], macro.iloc[1:])

    def test_car_pairs_with_micro_cer(self):
        """Test CAR + micro CER = 100 whichever averaging is reported"""
        pairs = [("а", "аааа"), ("б", "а")]
        micro = corpus_eval(pairs)
        assert corpus_eval(pairs, macro=True).car == micro.car
        assert micro.car + micro.cer == pytest.approx(100.0)

    def test_per_char_accuracy(self):
        """Test a ground-truth character is correct only when matched"""
        report = corpus_eval([("алмата", "алматы")], symbols="аы")
        assert report.per_char["ы"] == 0.0
        assert report.per_char["а"] == 100.0
        assert report.char_stats["а"].count == 2

    def test_listed_symbol_without_occurrences(self):
        """Test symbols absent from the ground truth report no accuracy"""
        report = corpus_eval([("а", "а")], symbols="аб")
        assert report.per_char["б"] is None

    def test_empty_corpus(self):
        """Test an empty pair list raises"""
        with pytest.raises(ContractError):
            corpus_eval([])

    def test_report_csv(self, tmp_path):
        """Test the CSV has overall rows then one row per character"""
        path = tmp_path / "report.csv"
        assert corpus_eval([("аб", "аб")]).write_csv(path)
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["section", "key", "value", "count"]
        assert frame.iloc[0]["key"] == "cer_micro"
        assert set(frame[frame["section"] == "char"]["key"]) == {"а", "б"}

    def test_report_csv_unwritable(self, tmp_path):
        """Test a path under a regular file reports failure instead of raising"""
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        assert corpus_eval([("аб", "аб")]).write_csv(blocker / "report.csv") is False
