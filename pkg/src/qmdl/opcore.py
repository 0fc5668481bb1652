"""Dense complex-matrix kernel.

Operators are plain complex numpy arrays. Validators enforce the invariant
ladder (square/finite -> Hermitian -> positive with trace <= 1 -> unit trace);
everything downstream works on validated arrays and stays pure.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .config import TOL, dense_cap
from .errors import (
    DimensionMismatch,
    FunctionDomainError,
    InvalidOperator,
    SizeCapExceeded,
    ZeroTrace,
)

__all__ = [
    "as_operator",
    "check_hermitian",
    "check_semi_density",
    "check_density",
    "check_cap",
    "tensor",
    "tensor_power",
    "partial_trace",
    "Spectrum",
    "eigh",
    "func_calculus",
    "herm_sqrt",
    "herm_power",
    "herm_log",
    "op_norm",
    "trace_inner_norm",
    "norms",
    "normalize",
    "pinv_sqrt",
]


def as_operator(t: np.ndarray) -> np.ndarray:
    """Validate and return a dense square complex operator."""
    t = np.asarray(t, dtype=complex)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise InvalidOperator(f"expected a square matrix, got shape {t.shape}")
    if not np.all(np.isfinite(t.real)) or not np.all(np.isfinite(t.imag)):
        raise InvalidOperator("operator entries must be finite")
    return t


def check_hermitian(t: np.ndarray, tol: float = TOL.herm) -> np.ndarray:
    t = as_operator(t)
    dev = np.max(np.abs(t - t.conj().T)) if t.size else 0.0
    if dev > tol:
        raise InvalidOperator(f"not Hermitian: max deviation {dev:.3e} > {tol:.1e}")
    return t


def check_semi_density(t: np.ndarray) -> np.ndarray:
    t = check_hermitian(t)
    w = np.linalg.eigvalsh((t + t.conj().T) / 2)
    if w.size and w[0] < -TOL.psd:
        raise InvalidOperator(f"not PSD: min eigenvalue {w[0]:.3e}")
    tr = np.trace(t)
    if tr.real > 1 + TOL.trace or abs(tr.imag) > TOL.trace:
        raise InvalidOperator(f"trace {tr} exceeds semi-density bound")
    return t


def check_density(t: np.ndarray) -> np.ndarray:
    t = check_semi_density(t)
    if abs(np.trace(t) - 1) > TOL.trace:
        raise InvalidOperator(f"trace {np.trace(t)} != 1")
    return t


def check_cap(dim: int) -> None:
    cap = dense_cap()
    if dim > cap:
        raise SizeCapExceeded(
            f"dense dimension {dim} exceeds cap {cap}; use factorized operations"
        )


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the dense dimension cap enforced."""
    a, b = as_operator(a), as_operator(b)
    check_cap(a.shape[0] * b.shape[0])
    return np.kron(a, b)


def tensor_power(a: np.ndarray, n: int) -> np.ndarray:
    """n-fold Kronecker power; n = 0 gives the 1x1 identity."""
    if n < 0:
        raise ValueError("tensor power requires n >= 0")
    a = as_operator(a)
    check_cap(a.shape[0] ** max(n, 1))
    out = np.eye(1, dtype=complex)
    for _ in range(n):
        out = np.kron(out, a)
    return out


def partial_trace(t: np.ndarray, dims: list[int], site: int) -> np.ndarray:
    """Trace out the factor `site` (0-based) of a product-space operator."""
    t = as_operator(t)
    total = int(np.prod(dims))
    if total != t.shape[0]:
        raise DimensionMismatch(
            f"factor dims {dims} give {total}, operator has dim {t.shape[0]}"
        )
    if not 0 <= site < len(dims):
        raise DimensionMismatch(f"site {site} out of range for {len(dims)} factors")
    k = len(dims)
    tens = t.reshape(*dims, *dims)
    out = np.trace(tens, axis1=site, axis2=k + site)
    kept = total // dims[site]
    return out.reshape(kept, kept)


def trace_out_last(t: np.ndarray, dim_keep: int, dim_last: int) -> np.ndarray:
    """Partial trace over the final tensor factor."""
    return partial_trace(t, [dim_keep, dim_last], 1)


class Spectrum(NamedTuple):
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(t: np.ndarray) -> Spectrum:
    """Spectral decomposition of a Hermitian operator."""
    t = check_hermitian(t)
    w, v = np.linalg.eigh((t + t.conj().T) / 2)
    return Spectrum(w, v)


def func_calculus(
    t: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    strict: bool = True,
) -> np.ndarray:
    """Apply a scalar function to the spectrum and reconstruct.

    With strict=True a non-finite value of f on any eigenvalue raises
    FunctionDomainError. With strict=False, non-finite spectral values are
    replaced by 0 (the support convention used by herm_sqrt/herm_log).
    """
    w, v = eigh(t)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    bad = ~np.isfinite(fw)
    if np.any(bad):
        if strict:
            raise FunctionDomainError(
                f"function undefined on eigenvalues {w[bad]}"
            )
        fw = np.where(bad, 0.0, fw)
    return (v * fw) @ v.conj().T


def _clip_support(w: np.ndarray) -> np.ndarray:
    """Eigenvalues in [-psd tol, support tol] become exact zeros."""
    out = w.copy()
    out[(out >= -TOL.psd) & (out <= TOL.support)] = 0.0
    return out


def herm_sqrt(t: np.ndarray, strict: bool = False) -> np.ndarray:
    """Square root of a PSD operator under the support convention."""
    w, v = eigh(t)
    w = _clip_support(w)
    if strict and np.any(w < 0):
        raise FunctionDomainError(f"sqrt of negative eigenvalue {w[w < 0]}")
    fw = np.sqrt(np.clip(w, 0.0, None))
    return (v * fw) @ v.conj().T


def herm_power(t: np.ndarray, p: float, strict: bool = False) -> np.ndarray:
    """Spectral power T^p on the support of a PSD operator."""
    w, v = eigh(t)
    w = _clip_support(w)
    if strict and np.any(w < 0):
        raise FunctionDomainError(f"power of negative eigenvalue {w[w < 0]}")
    w = np.clip(w, 0.0, None)
    fw = np.zeros_like(w)
    pos = w > 0
    fw[pos] = w[pos] ** p
    return (v * fw) @ v.conj().T


def herm_log(t: np.ndarray, base: float = 2.0, strict: bool = False) -> np.ndarray:
    """Spectral logarithm restricted to the support of a PSD operator.

    Eigenvalues <= support tolerance are excluded (their spectral projectors
    map to 0). strict=True raises on them instead.
    """
    w, v = eigh(t)
    pos = w > TOL.support
    if strict and not np.all(pos):
        raise FunctionDomainError(f"log of eigenvalues {w[~pos]}")
    fw = np.zeros_like(w)
    fw[pos] = np.log(w[pos]) / np.log(base)
    return (v * fw) @ v.conj().T


def op_norm(t: np.ndarray) -> float:
    """Operator (largest-singular-value) norm."""
    t = as_operator(t)
    if t.size == 0:
        return 0.0
    return float(np.linalg.norm(t, 2))


def trace_inner_norm(t: np.ndarray) -> float:
    """Hilbert-Schmidt norm sqrt(Tr(T^dagger T))."""
    t = as_operator(t)
    return float(np.sqrt(np.sum(np.abs(t) ** 2)))


def norms(t: np.ndarray) -> tuple[float, float]:
    return op_norm(t), trace_inner_norm(t)


def normalize(t: np.ndarray) -> np.ndarray:
    """Send a nonzero semi-density matrix to its unit-trace companion."""
    t = as_operator(t)
    tr = np.trace(t).real
    if tr <= TOL.norm:
        raise ZeroTrace(f"trace {tr:.3e} below {TOL.norm:.1e}; normalization undefined")
    return t / tr


def pinv_sqrt(t: np.ndarray, rank_tol: float = TOL.rank) -> np.ndarray:
    """T^(-1/2) on the support: eigenvalues > rank_tol invert, others map to 0."""
    w, v = eigh(t)
    fw = np.zeros_like(w)
    keep = w > rank_tol
    fw[keep] = w[keep] ** -0.5
    return (v * fw) @ v.conj().T
