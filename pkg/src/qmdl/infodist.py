"""Divergences between (semi-)density matrices and between word distributions.

Infinite values are returned, never raised, so experiment code can average
them. Every value carries its log-base tag: relative entropy defaults to bits
(it composes with the 2^(-n eps) universality algebra), the Renyi divergence
defaults to nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import TOL
from .opcore import as_operator, eigh, herm_power, herm_sqrt
from .projlat import ProjSystem
from .qsource import word_distribution
from .typeclasses import class_log_prob

__all__ = [
    "DivergenceValue",
    "rel_entropy",
    "hellinger_sq",
    "renyi",
    "kl_classical",
    "hellinger_sq_classical",
    "renyi_classical",
    "word_divergences",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class DivergenceValue:
    value: float  # finite or +inf
    base: str     # "bits" | "nats"

    def in_bits(self) -> float:
        return self.value if self.base == "bits" else self.value / LN2

    def in_nats(self) -> float:
        return self.value if self.base == "nats" else self.value * LN2


def _base_factor(base: str) -> float:
    if base == "bits":
        return LN2
    if base == "nats":
        return 1.0
    raise ValueError(f"unknown base {base!r}")


def rel_entropy(r1: np.ndarray, r2: np.ndarray, base: str = "bits") -> DivergenceValue:
    """Quantum relative entropy Tr(r1 log r1) - Tr(r1 log r2), support convention.

    +inf when r1 carries mass outside the support of r2.
    """
    r1, r2 = as_operator(r1), as_operator(r2)
    scale = _base_factor(base)
    w1, v1 = eigh(r1)
    w2, v2 = eigh(r2)
    # mass of r1 on the kernel of r2
    kernel = v2[:, w2 <= TOL.support]
    if kernel.shape[1]:
        leak = np.trace(kernel.conj().T @ r1 @ kernel).real
        if leak > 1e-9:
            return DivergenceValue(np.inf, base)
    pos1 = w1 > TOL.support
    term1 = float(np.sum(w1[pos1] * np.log(w1[pos1])))
    pos2 = w2 > TOL.support
    overlap = v2[:, pos2].conj().T @ r1 @ v2[:, pos2]
    term2 = float(np.real(np.diag(overlap)) @ np.log(w2[pos2]))
    return DivergenceValue((term1 - term2) / scale, base)


def hellinger_sq(r1: np.ndarray, r2: np.ndarray) -> DivergenceValue:
    """Squared Hellinger distance ||sqrt(r1) - sqrt(r2)||_T^2."""
    s1, s2 = herm_sqrt(r1), herm_sqrt(r2)
    value = float(np.sum(np.abs(s1 - s2) ** 2))
    return DivergenceValue(value, "nats")


def renyi(lam: float, r1: np.ndarray, r2: np.ndarray, base: str = "nats") -> DivergenceValue:
    """Renyi divergence -(1/(1-lam)) log Tr(r1^lam r2^(1-lam)), lam in (0, 1)."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"Renyi order must lie in (0, 1), got {lam}")
    a = np.trace(herm_power(r1, lam) @ herm_power(r2, 1.0 - lam)).real
    if a <= TOL.support:
        return DivergenceValue(np.inf, base)
    value = -math.log(a) / (1.0 - lam) / _base_factor(base)
    return DivergenceValue(value, base)


def kl_classical(p: np.ndarray, q: np.ndarray, base: str = "bits") -> float:
    """sum p log(p/q) with the support convention; +inf on support violation."""
    scale = _base_factor(base)
    total = 0.0
    for pi, qi in zip(p, q):
        if pi <= 0.0:
            continue
        if qi <= 0.0:
            return np.inf
        total += pi * math.log(pi / qi)
    return total / scale


def hellinger_sq_classical(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum((np.sqrt(np.clip(p, 0, None)) - np.sqrt(np.clip(q, 0, None))) ** 2))


def renyi_classical(lam: float, p: np.ndarray, q: np.ndarray, base: str = "nats") -> float:
    if not 0.0 < lam < 1.0:
        raise ValueError(f"Renyi order must lie in (0, 1), got {lam}")
    a = float(np.sum(np.clip(p, 0, None) ** lam * np.clip(q, 0, None) ** (1.0 - lam)))
    if a <= 0.0:
        return np.inf
    return -math.log(a) / (1.0 - lam) / _base_factor(base)


def word_divergences(
    src_a,
    src_b,
    system: ProjSystem,
    n: int,
    kind: str = "S",
    lam: float = 0.5,
    base: str | None = None,
) -> DivergenceValue:
    """Classical divergence between length-n outcome-word distributions.

    kind: "S" (relative entropy, bits), "he2", or "renyi" (order lam, nats).
    Computed over type classes with multiplicities; exact for exchangeable
    sources.
    """
    rows_a = word_distribution(src_a, system, n)
    rows_b = word_distribution(src_b, system, n)
    if kind == "S":
        base = base or "bits"
        scale = _base_factor(base)
        total = 0.0
        for (counts, logmult, pa), (_, _, pb) in zip(rows_a, rows_b):
            if pa <= 0.0:
                continue
            if pb <= 0.0:
                return DivergenceValue(np.inf, base)
            total += math.exp(logmult) * pa * math.log(pa / pb)
        return DivergenceValue(total / scale, base)
    if kind == "he2":
        total = 0.0
        for (counts, logmult, pa), (_, _, pb) in zip(rows_a, rows_b):
            mult = math.exp(logmult)
            total += mult * (math.sqrt(max(pa, 0.0)) - math.sqrt(max(pb, 0.0))) ** 2
        return DivergenceValue(total, "nats")
    if kind == "renyi":
        base = base or "nats"
        if not 0.0 < lam < 1.0:
            raise ValueError(f"Renyi order must lie in (0, 1), got {lam}")
        affinity = 0.0
        for (counts, logmult, pa), (_, _, pb) in zip(rows_a, rows_b):
            if pa <= 0.0 or pb <= 0.0:
                continue
            affinity += math.exp(logmult) * pa**lam * pb ** (1.0 - lam)
        if affinity <= 0.0:
            return DivergenceValue(np.inf, base)
        value = -math.log(affinity) / (1.0 - lam) / _base_factor(base)
        return DivergenceValue(value, base)
    raise ValueError(f"unknown divergence kind {kind!r}")
