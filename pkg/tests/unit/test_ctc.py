#!/usr/bin/env python3
"""
CTC loss unit tests
"""

import itertools
import math

import numpy as np
import pytest

from ctc import (
    ProbMatrix,
    collapse,
    ctc_batch_loss,
    ctc_loss,
    ctc_loss_from_logits,
    label_feasible,
    min_frames,
)
from errors import ContractError, FeasibilityError, ShapeError
from numerics import Tensor, check_gradients, relative_error


def brute_force_probability(probs, label):
    """Sum of path probabilities over every path collapsing to label"""
    t_steps, classes = probs.shape
    blank = classes - 1
    total = 0.0
    for path in itertools.product(range(classes), repeat=t_steps):
        if collapse(path, blank) == tuple(label):
            total += math.prod(probs[t, k] for t, k in enumerate(path))
    return total


def random_matrix(rng, t_steps, classes):
    return ProbMatrix.from_logits(rng.normal(scale=2.0, size=(t_steps, classes)))


@pytest.mark.unit
class TestCollapse:
    """Path collapsing"""

    @pytest.mark.parametrize(
        ("path", "expected"),
        [((0, 0, 2, 1), (0, 1)), ((0, 2, 0), (0, 0)), ((2, 2), ()), ((1, 1, 1), (1,))],
    )
    def test_collapse(self, path, expected):
        """Test merge-then-drop-blank"""
        assert collapse(path, blank=2) == expected

    def test_min_frames_counts_repeats(self):
        """Test repeated symbols need a separating blank"""
        assert min_frames((0, 0, 1)) == 4
        assert label_feasible((0, 0, 1), 4)
        assert not label_feasible((0, 0, 1), 3)


@pytest.mark.unit
class TestProbMatrix:
    """ProbMatrix validation"""

    def test_rows_must_sum_to_one(self):
        """Test a row summing to 0.9 is rejected"""
        with pytest.raises(ContractError):
            ProbMatrix(np.array([[0.5, 0.4]]))

    def test_negative_entries(self):
        """Test negative probabilities are rejected"""
        with pytest.raises(ContractError):
            ProbMatrix(np.array([[1.5, -0.5]]))

    def test_rank(self):
        """Test a vector is not a matrix"""
        with pytest.raises(ShapeError):
            ProbMatrix(np.array([0.5, 0.5]))

    def test_blank_is_last_column(self):
        """Test blank index is C"""
        m = ProbMatrix(np.full((3, 4), 0.25))
        assert (m.blank, m.charset_size, m.t_steps) == (3, 3, 3)


@pytest.mark.unit
class TestLoss:
    """Loss values"""

    def test_single_frame(self):
        """Test T=1 single path loss is -ln 0.7"""
        loss, _ = ctc_loss(ProbMatrix(np.array([[0.7, 0.3]])), (0,))
        assert loss == pytest.approx(-math.log(0.7), abs=1e-12)

    def test_two_frames(self):
        """Test three alignments of 'a' over two frames sum to 0.8"""
        loss, _ = ctc_loss(ProbMatrix(np.array([[0.6, 0.4], [0.5, 0.5]])), (0,))
        assert loss == pytest.approx(-math.log(0.8), abs=1e-12)

    def test_empty_label(self):
        """Test the empty label is the all-blank path"""
        m = ProbMatrix(np.array([[0.6, 0.4], [0.5, 0.5]]))
        loss, _ = ctc_loss(m, ())
        assert loss == pytest.approx(-math.log(0.2), abs=1e-12)

    def test_matches_brute_force(self):
        """Test exp(-loss) against enumeration over all paths"""
        rng = np.random.default_rng(7)
        for _ in range(60):
            t_steps = int(rng.integers(1, 7))
            charset = int(rng.integers(1, 5))
            length = int(rng.integers(0, 4))
            label = tuple(int(s) for s in rng.integers(0, charset, size=length))
            if not label_feasible(label, t_steps) or (charset + 1) ** t_steps > 20000:
                continue
            m = random_matrix(rng, t_steps, charset + 1)
            loss, _ = ctc_loss(m, label)
            assert math.exp(-loss) == pytest.approx(brute_force_probability(m.probs, label), abs=1e-9)

    def test_loss_non_negative(self, rng):
        """Test loss is never negative"""
        for _ in range(20):
            m = random_matrix(rng, 5, 4)
            assert ctc_loss(m, (0, 1))[0] >= 0.0

    def test_zero_probabilities_do_not_nan(self):
        """Test exact zeros give a finite loss and gradient"""
        probs = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        loss, grad = ctc_loss(ProbMatrix(probs), (0, 1))
        assert loss == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.isfinite(grad))

    def test_unreachable_label_is_infinite(self):
        """Test a feasible label with zero mass gives inf and a zero gradient"""
        probs = np.array([[0.0, 1.0], [0.0, 1.0]])
        loss, grad = ctc_loss(ProbMatrix(probs), (0,))
        assert loss == math.inf
        assert not np.any(grad)


@pytest.mark.unit
class TestErrors:
    """Label contract"""

    def test_infeasible_label(self):
        """Test a label needing more frames than T raises"""
        with pytest.raises(FeasibilityError):
            ctc_loss(ProbMatrix(np.full((2, 2), 0.5)), (0, 0))

    def test_zero_frames_empty_label(self):
        """Test an empty label on a zero-frame matrix has loss 0 and an empty gradient"""
        loss, grad = ctc_loss(ProbMatrix(np.zeros((0, 3))), ())
        assert loss == 0.0
        assert grad.shape == (0, 3)
        assert ctc_loss_from_logits(np.zeros((0, 3)), ())[0] == 0.0

    def test_zero_frames_non_empty_label(self):
        """Test any non-empty label is infeasible on zero frames"""
        with pytest.raises(FeasibilityError):
            ctc_loss(ProbMatrix(np.zeros((0, 3))), (1,))

    def test_symbol_outside_charset(self):
        """Test the blank index is not a label symbol"""
        with pytest.raises(ContractError):
            ctc_loss(ProbMatrix(np.full((3, 3), 1 / 3)), (2,))


@pytest.mark.unit
class TestGradient:
    """Gradient w.r.t. pre-softmax logits"""

    def test_against_finite_differences(self):
        """Test analytic logits gradient on random small instances"""
        rng = np.random.default_rng(11)
        h = 1e-6
        for t_steps, classes, label in [(4, 3, (0, 1)), (6, 5, (1, 1, 3)), (5, 2, (0,)), (3, 4, ())]:
            logits = rng.normal(size=(t_steps, classes))
            _, analytic = ctc_loss_from_logits(logits, label)
            numeric = np.zeros_like(logits)
            for index in np.ndindex(logits.shape):
                plus, minus = logits.copy(), logits.copy()
                plus[index] += h
                minus[index] -= h
                numeric[index] = (
                    ctc_loss_from_logits(plus, label)[0] - ctc_loss_from_logits(minus, label)[0]
                ) / (2 * h)
            assert relative_error(analytic, numeric) < 1e-6

    def test_gradient_rows_sum_to_zero(self, rng):
        """Test each frame's gradient sums to zero (softmax invariance)"""
        _, grad = ctc_loss_from_logits(rng.normal(size=(6, 4)), (0, 2))
        np.testing.assert_allclose(grad.sum(axis=1), 0.0, atol=1e-12)

    def test_batch_loss_is_mean(self, rng):
        """Test batch loss averages per-sample losses and backpropagates"""
        logits = Tensor(rng.normal(size=(2, 5, 3)))
        labels = [(0,), (1, 0)]
        expected = np.mean([ctc_loss_from_logits(logits.data[i], labels[i])[0] for i in range(2)])
        assert ctc_batch_loss(logits, labels).item() == pytest.approx(expected)
        assert check_gradients(lambda: ctc_batch_loss(logits, labels), [logits]) < 1e-6

    def test_batch_label_count(self, rng):
        """Test a batch with too few labels raises"""
        with pytest.raises(ContractError):
            ctc_batch_loss(Tensor(rng.normal(size=(2, 5, 3))), [(0,)])
