#!/usr/bin/env python3
"""
Exhaustive-oracle checks at full instance counts
"""

import itertools
import math
import time
from collections import defaultdict
from functools import lru_cache

import numpy as np
import pytest

from ctc import ProbMatrix, collapse, ctc_loss, ctc_loss_from_logits, label_feasible
from data import Charset
from decode import PrefixTree, beam_search, labeling_probability, word_beam_search
from metrics import distance
from numerics import relative_error

DICTIONARY = ["мост", "сок", "рот", "кот", "ток", "рок", "сор", "тор", "нос", "вал"]


def labeling_masses(probs):
    t_steps, classes = probs.shape
    paths = np.array(list(itertools.product(range(classes), repeat=t_steps)))
    weights = probs[np.arange(t_steps), paths].prod(axis=1)
    masses = defaultdict(float)
    for path, weight in zip(paths.tolist(), weights, strict=True):
        masses[collapse(path, classes - 1)] += weight
    return masses


def random_case(rng, max_t=6, max_c=4, max_label=3):
    """Random matrix and a label that fits it"""
    while True:
        t_steps = int(rng.integers(1, max_t + 1))
        charset_size = int(rng.integers(1, max_c + 1))
        label = tuple(int(k) for k in rng.integers(0, charset_size, size=int(rng.integers(0, max_label + 1))))
        if label_feasible(label, t_steps):
            logits = rng.normal(scale=1.5, size=(t_steps, charset_size + 1))
            return logits, label


def recursive_distances(a, others):
    """Textbook recursive Levenshtein from ``a`` to each of ``others``, memoised per ``a``"""

    @lru_cache(maxsize=None)
    def rec(i, b):
        if i == len(a):
            return len(b)
        if not b:
            return len(a) - i
        return min(rec(i + 1, b) + 1, rec(i, b[1:]) + 1, rec(i + 1, b[1:]) + (a[i] != b[0]))

    return [rec(0, b) for b in others]


@pytest.mark.performance
@pytest.mark.slow
class TestOracles:
    """Loss, decoders and edit distance against enumeration"""

    def test_ctc_matches_path_enumeration(self):
        """Test exp(−loss) equals the summed path mass on 500 instances, loss time under 10 s"""
        rng = np.random.default_rng(2024)
        cases = [random_case(rng) for _ in range(500)]
        matrices = [ProbMatrix.from_logits(logits) for logits, _ in cases]
        start = time.perf_counter()
        losses = [ctc_loss(m, label)[0] for m, (_, label) in zip(matrices, cases, strict=True)]
        assert time.perf_counter() - start < 10.0
        for m, (_, label), loss in zip(matrices, cases, losses, strict=True):
            assert math.exp(-loss) == pytest.approx(labeling_masses(m.probs)[label], abs=1e-9)

    def test_gradient_on_100_instances(self):
        """Test logits gradients against central differences with h = 1e-5"""
        rng = np.random.default_rng(7)
        h = 1e-5
        for _ in range(100):
            logits, label = random_case(rng)
            _, analytic = ctc_loss_from_logits(logits, label)
            numeric = np.zeros_like(logits)
            for index in np.ndindex(logits.shape):
                plus, minus = logits.copy(), logits.copy()
                plus[index] += h
                minus[index] -= h
                numeric[index] = (
                    ctc_loss_from_logits(plus, label)[0] - ctc_loss_from_logits(minus, label)[0]
                ) / (2 * h)
            assert relative_error(analytic, numeric) <= 1e-6

    def test_wide_beam_is_exact_on_200_matrices(self):
        """Test a beam of at least (C+1)^T entries finds the maximum-mass labeling"""
        rng = np.random.default_rng(9)
        for _ in range(200):
            t_steps = int(rng.integers(1, 6))
            classes = int(rng.integers(2, 5))
            m = ProbMatrix.from_logits(rng.normal(scale=1.5, size=(t_steps, classes)))
            best = max(labeling_masses(m.probs).values())
            width = classes**t_steps
            assert labeling_probability(m, beam_search(m, width)) == pytest.approx(best, rel=1e-9)

    def test_word_beam_outputs_on_1000_matrices(self, word_charset):
        """Test word beam search only emits dictionary words"""
        tree = PrefixTree.from_words(DICTIONARY, word_charset)
        rng = np.random.default_rng(13)
        for _ in range(1000):
            m = ProbMatrix.from_logits(rng.normal(scale=3.0, size=(10, len(word_charset) + 1)))
            text = word_charset.decode(word_beam_search(m, tree, beam_width=10))
            assert text == "" or set(text.split(" ")) <= set(DICTIONARY)

    def test_full_dictionary_matches_beam_search(self):
        """Test an all-labelings dictionary leaves word beam search unconstrained"""
        charset = Charset(("a", "b"), name="ab")
        words = ["".join(chars) for n in range(1, 5) for chars in itertools.product("ab", repeat=n)]
        tree = PrefixTree.from_words(words, charset)
        rng = np.random.default_rng(17)
        for _ in range(100):
            m = ProbMatrix.from_logits(rng.normal(size=(4, 3)))
            assert word_beam_search(m, tree, beam_width=25) == beam_search(m, 25)

    def test_levenshtein_up_to_length_six(self):
        """Test every pair of strings up to length 6 over three letters"""
        strings = ["".join(chars) for n in range(7) for chars in itertools.product("абв", repeat=n)]
        assert len(strings) == 1093
        for a in strings:
            assert [distance(a, b) for b in strings] == recursive_distances(a, strings)
