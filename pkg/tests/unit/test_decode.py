#!/usr/bin/env python3
"""
Decoder unit tests: best path, beam search, word beam search, bigram LM
"""

import itertools
import math
from collections import defaultdict

import numpy as np
import pytest

from ctc import ProbMatrix, collapse
from data import Charset
from decode import (
    CharLM,
    DecoderConfig,
    DecoderName,
    PrefixTree,
    beam_search,
    best_path,
    decode,
    labeling_probability,
    path_score,
    word_beam_search,
)
from errors import ConfigError


def labeling_masses(probs):
    """Total probability of every labeling, by enumerating all paths"""
    t_steps, classes = probs.shape
    masses = defaultdict(float)
    for path in itertools.product(range(classes), repeat=t_steps):
        masses[collapse(path, classes - 1)] += math.prod(probs[t, k] for t, k in enumerate(path))
    return masses


def spelled(charset, word, favoured=None, weight=0.7):
    """Letter frame then blank frame per character; ``favoured`` overrides letters by position"""
    classes = len(charset) + 1
    rows = []
    for position, ch in enumerate(word):
        row = np.full(classes, (1.0 - weight) / (classes - 1))
        row[charset.index(ch)] = weight
        if favoured and position in favoured:
            row = favoured[position]
        rows.append(row)
        blank = np.full(classes, 0.1 / (classes - 1))
        blank[-1] = 0.9
        rows.append(blank)
    return ProbMatrix(np.array(rows))


@pytest.mark.unit
class TestBestPath:
    """Best path decoding"""

    def test_argmax_then_collapse(self):
        """Test (a, blank) decodes to 'a'"""
        assert best_path(ProbMatrix(np.array([[0.6, 0.4], [0.3, 0.7]]))) == (0,)

    def test_one_hot_rows(self):
        """Test one-hot a, a, blank, b gives 'ab'"""
        probs = np.eye(3)[[0, 0, 2, 1]]
        assert best_path(ProbMatrix(probs)) == (0, 1)

    def test_uniform_rows_tie_to_lowest_index(self):
        """Test ties go to class 0, collapsing to a single symbol"""
        assert best_path(ProbMatrix(np.full((4, 3), 1 / 3))) == (0,)

    def test_matches_argmax_oracle(self, rng):
        """Test against a one-line argmax-collapse oracle"""
        for _ in range(50):
            m = ProbMatrix.from_logits(rng.normal(size=(int(rng.integers(1, 9)), 4)))
            assert best_path(m) == collapse(list(m.probs.argmax(axis=1)), 3)

    def test_path_score(self):
        """Test path score is the product of row maxima"""
        assert path_score(ProbMatrix(np.array([[0.6, 0.4], [0.3, 0.7]]))) == pytest.approx(0.42)


@pytest.mark.unit
class TestBeamSearch:
    """Prefix beam search"""

    def test_labeling_mass_beats_best_path(self):
        """Test 'a' (mass 0.64) wins over the all-blank best path (0.36)"""
        m = ProbMatrix(np.array([[0.4, 0.6], [0.4, 0.6]]))
        assert best_path(m) == ()
        assert beam_search(m, 25) == (0,)
        assert labeling_probability(m, (0,)) == pytest.approx(0.64)

    def test_width_one_on_one_hot(self):
        """Test a width-1 beam equals best path on one-hot matrices"""
        probs = np.eye(4)[[0, 3, 1, 1, 3, 2]]
        m = ProbMatrix(probs)
        assert beam_search(m, 1) == best_path(m)

    def test_wide_beam_is_exact(self):
        """Test a wide beam finds the maximum-mass labeling"""
        rng = np.random.default_rng(5)
        for _ in range(25):
            t_steps = int(rng.integers(1, 6))
            classes = int(rng.integers(2, 5))
            m = ProbMatrix.from_logits(rng.normal(scale=1.5, size=(t_steps, classes)))
            best = max(labeling_masses(m.probs).values())
            assert labeling_probability(m, beam_search(m, 1000)) == pytest.approx(best, rel=1e-9)

    def test_dominates_best_path(self, rng):
        """Test the beam labeling's mass is at least best path's"""
        for _ in range(20):
            m = ProbMatrix.from_logits(rng.normal(size=(6, 4)))
            beam = labeling_probability(m, beam_search(m, 25))
            assert beam >= labeling_probability(m, best_path(m)) - 1e-12

    def test_width_below_one(self):
        """Test beam width 0 is a configuration error"""
        with pytest.raises(ConfigError):
            beam_search(ProbMatrix(np.full((2, 2), 0.5)), 0)

    def test_deterministic(self, rng):
        """Test repeated calls agree"""
        m = ProbMatrix.from_logits(rng.normal(size=(8, 5)))
        assert beam_search(m, 5) == beam_search(m, 5)


@pytest.mark.unit
class TestPrefixTree:
    """Dictionary trie"""

    def test_membership_and_prefixes(self, word_charset):
        """Test words are members and their prefixes are prefixes"""
        tree = PrefixTree.from_words(["мост", "мор"], word_charset)
        assert word_charset.encode("мост") in tree
        assert word_charset.encode("мо") not in tree
        assert tree.is_prefix(word_charset.encode("мо"))
        assert not tree.is_prefix(word_charset.encode("к"))
        assert len(tree) == 2

    def test_words_roundtrip(self, word_charset):
        """Test every added word is enumerated"""
        words = {"мост", "мор", "сок"}
        tree = PrefixTree.from_words(sorted(words), word_charset)
        assert {word_charset.decode(w) for w in tree.words()} == words

    def test_unencodable_words_skipped(self, word_charset):
        """Test words with foreign symbols are dropped"""
        tree = PrefixTree.from_words(["мост", "яблоко"], word_charset)
        assert len(tree) == 1

    def test_empty_dictionary(self, word_charset):
        """Test an empty dictionary is a configuration error"""
        with pytest.raises(ConfigError):
            PrefixTree.from_words(["яблоко"], word_charset)

    def test_from_file(self, tmp_path, word_charset):
        """Test one word per line"""
        path = tmp_path / "dict.txt"
        path.write_text("мост\nсок\n", encoding="utf-8")
        assert len(PrefixTree.from_file(path, word_charset)) == 2


@pytest.mark.unit
class TestWordBeamSearch:
    """Dictionary-constrained decoding"""

    def test_corrects_to_dictionary_word(self):
        """Test a matrix leaning towards 'алмата' decodes to 'алматы'"""
        charset = Charset.from_text(["алматы", "алмата"])
        tree = PrefixTree.from_words(["алматы"], charset)
        classes = len(charset) + 1
        last = np.full(classes, 0.1 / (classes - 2))
        last[charset.index("а")] = 0.55
        last[charset.index("ы")] = 0.35
        m = spelled(charset, "алмата", favoured={5: last})
        assert charset.decode(best_path(m)) == "алмата"
        assert charset.decode(word_beam_search(m, tree)) == "алматы"

    def test_output_in_dictionary_closure(self, rng, word_charset):
        """Test every output is dictionary words joined by spaces, or empty"""
        words = {"мост", "сок", "рот"}
        tree = PrefixTree.from_words(sorted(words), word_charset)
        for _ in range(15):
            m = ProbMatrix.from_logits(rng.normal(scale=3.0, size=(12, len(word_charset) + 1)))
            text = word_charset.decode(word_beam_search(m, tree, beam_width=10))
            assert text == "" or set(text.split(" ")) <= words

    def test_full_dictionary_equals_beam_search(self, rng):
        """Test a dictionary of every short labeling leaves the beam unconstrained"""
        charset = Charset(("a", "b"), name="ab")
        all_words = [
            "".join(chars) for n in range(1, 4) for chars in itertools.product("ab", repeat=n)
        ]
        tree = PrefixTree.from_words(all_words, charset)
        for _ in range(10):
            m = ProbMatrix.from_logits(rng.normal(size=(3, 3)))
            assert word_beam_search(m, tree, beam_width=25) == beam_search(m, 25)

    def test_lm_changes_nothing_when_weight_zero(self, rng, word_charset):
        """Test a zero-weight LM reproduces the LM-free result"""
        tree = PrefixTree.from_words(["мост", "сок", "рот"], word_charset)
        lm = CharLM.train(["мост сок", "рот"], word_charset)
        m = ProbMatrix.from_logits(rng.normal(size=(10, len(word_charset) + 1)))
        assert word_beam_search(m, tree, lm, lm_weight=0.0) == word_beam_search(m, tree)


@pytest.mark.unit
class TestCharLM:
    """Bigram character model"""

    def test_rows_are_distributions(self, word_charset):
        """Test every conditional sums to one"""
        lm = CharLM.train(["мост", "сок рот", "кот"], word_charset)
        np.testing.assert_allclose(np.exp(lm.log_probs).sum(axis=1), 1.0, atol=1e-9)

    def test_seen_bigram_more_likely(self, word_charset):
        """Test a frequent transition outscores an unseen one"""
        lm = CharLM.train(["мост"] * 5, word_charset)
        m, o, a = (word_charset.index(c) for c in "моа")
        assert lm.log_prob(m, o) > lm.log_prob(m, a)
        assert lm.log_prob(None, m) > lm.log_prob(None, a)

    def test_score_sums_transitions(self, word_charset):
        """Test a labeling score includes both boundaries"""
        lm = CharLM.train(["мост"], word_charset)
        label = word_charset.encode("мо")
        expected = lm.log_prob(None, label[0]) + lm.log_prob(label[0], label[1]) + lm.log_prob(label[1], None)
        assert lm.score(label) == pytest.approx(expected)

    def test_non_positive_smoothing(self, word_charset):
        """Test smoothing must be positive"""
        with pytest.raises(ConfigError):
            CharLM.train(["мост"], word_charset, smoothing=0.0)


@pytest.mark.unit
class TestDispatch:
    """decode() by name"""

    def test_word_decoder_needs_dictionary(self):
        """Test wordbeamsearch without a dictionary raises"""
        with pytest.raises(ConfigError):
            decode(ProbMatrix(np.full((2, 2), 0.5)), DecoderConfig(name=DecoderName.WORD_BEAM_SEARCH))

    def test_lm_decoder_needs_lm(self, word_charset):
        """Test wordbeamsearch+lm without a model raises"""
        tree = PrefixTree.from_words(["мост"], word_charset)
        m = ProbMatrix(np.full((2, len(word_charset) + 1), 1 / (len(word_charset) + 1)))
        with pytest.raises(ConfigError):
            decode(m, DecoderConfig(name=DecoderName.WORD_BEAM_SEARCH_LM), dictionary=tree)

    def test_default_is_best_path(self):
        """Test the default decoder is best path"""
        m = ProbMatrix(np.array([[0.4, 0.6], [0.4, 0.6]]))
        assert decode(m) == ()
        assert decode(m, DecoderConfig(name=DecoderName.BEAM_SEARCH)) == (0,)
        assert DecoderName.WORD_BEAM_SEARCH_LM.needs_dictionary
