"""The built-in one-parameter qubit family used throughout the experiments."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["example_state"]


def example_state(theta: float, c: float = 0.0) -> np.ndarray:
    """Qubit density matrix [[theta, s], [s, 1-theta]] with s = sqrt(c(theta-theta^2)).

    c in [0, 1] controls the off-diagonal coherence; c = 0 gives the classical
    (diagonal) Bernoulli family. Exact projectors at theta in {0, 1}.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"c must lie in [0, 1], got {c}")
    s = math.sqrt(c * (theta - theta * theta)) if 0.0 < theta < 1.0 else 0.0
    return np.array([[theta, s], [s, 1.0 - theta]], dtype=complex)
