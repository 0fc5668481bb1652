"""Type-class (histogram) enumeration for exchangeable word distributions.

Mixture-source levels are exchangeable, so a length-n word's probability
depends only on its outcome histogram. Enumerating C(n+m-1, m-1) histograms
instead of m^n words makes exact finite-n checks tractable.
"""

from __future__ import annotations

from math import lgamma
from typing import Iterator

import numpy as np

__all__ = [
    "compositions",
    "log_multinomial",
    "class_log_prob",
    "mixture_class_prob",
]


def compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All histograms of n outcomes over `parts` symbols."""
    if parts == 1:
        yield (n,)
        return
    for head in range(n + 1):
        for rest in compositions(n - head, parts - 1):
            yield (head,) + rest


def log_multinomial(counts: tuple[int, ...]) -> float:
    """log of the number of words sharing the histogram `counts`."""
    n = sum(counts)
    return lgamma(n + 1) - sum(lgamma(k + 1) for k in counts)


def class_log_prob(probs: np.ndarray, counts: tuple[int, ...]) -> float:
    """log probability of one word with histogram `counts` under i.i.d. `probs`.

    Zero-probability symbols with zero count contribute nothing; with a
    positive count the word has probability zero (-inf).
    """
    total = 0.0
    for p, k in zip(probs, counts):
        if k == 0:
            continue
        if p <= 0.0:
            return -np.inf
        total += k * np.log(p)
    return total


def mixture_class_prob(
    weights: np.ndarray, letter_probs: np.ndarray, counts: tuple[int, ...]
) -> float:
    """Per-word probability of a histogram under a mixture of i.i.d. laws.

    letter_probs has one row of outcome probabilities per mixture component.
    """
    total = 0.0
    for w, probs in zip(weights, letter_probs):
        lp = class_log_prob(probs, counts)
        if lp > -np.inf:
            total += w * np.exp(lp)
    return total
