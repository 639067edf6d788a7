"""
Best path decoding
"""

from __future__ import annotations

import math

import numpy as np

from ctc import Label, ProbMatrix, collapse, label_feasible, log_likelihood


def best_path(m: ProbMatrix) -> Label:
    """Collapse of the per-frame argmax; ties go to the lowest class index"""
    return collapse(np.argmax(m.probs, axis=1).tolist(), m.blank)


def path_score(m: ProbMatrix) -> float:
    """Probability of the single best path: product of per-frame maxima"""
    return float(np.prod(m.probs.max(axis=1))) if m.t_steps else 1.0


def labeling_probability(m: ProbMatrix, label: Label) -> float:
    """Total probability of ``label`` summed over all alignments"""
    if not label_feasible(label, m.t_steps):
        return 0.0
    return math.exp(log_likelihood(m.log_probs(), label))
