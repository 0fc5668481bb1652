"""Dense operator kernel: validators, tensor algebra, functional calculus."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmdl import (
    FunctionDomainError,
    InvalidOperator,
    SizeCapExceeded,
    ZeroTrace,
    as_operator,
    check_density,
    check_hermitian,
    check_semi_density,
    eigh,
    func_calculus,
    herm_log,
    herm_power,
    herm_sqrt,
    normalize,
    norms,
    op_norm,
    partial_trace,
    pinv_sqrt,
    tensor,
    tensor_power,
    trace_inner_norm,
    trace_out_last,
)
from conftest import random_density, random_hermitian


def test_as_operator_rejects_non_square():
    with pytest.raises(InvalidOperator):
        as_operator(np.zeros((2, 3)))


def test_as_operator_rejects_nan():
    with pytest.raises(InvalidOperator):
        as_operator(np.array([[np.nan, 0], [0, 1]]))


def test_check_hermitian_catches_skew():
    with pytest.raises(InvalidOperator):
        check_hermitian(np.array([[0, 1], [-1, 0]], dtype=complex))


def test_check_density_accepts_qubit_state():
    check_density(np.array([[0.3, 0.1], [0.1, 0.7]]))


def test_check_density_rejects_semi_density():
    with pytest.raises(InvalidOperator):
        check_density(0.5 * np.eye(2) / 2)
    check_semi_density(0.5 * np.eye(2) / 2)


def test_check_semi_density_rejects_negative_eigenvalue():
    with pytest.raises(InvalidOperator):
        check_semi_density(np.diag([1.0, -0.5]))


def test_tensor_matches_kron(rng):
    a = random_hermitian(rng, 2)
    b = random_hermitian(rng, 3)
    assert np.allclose(tensor(a, b), np.kron(a, b))


def test_tensor_respects_dense_cap(monkeypatch):
    monkeypatch.setenv("QMDL_DENSE_CAP", "3")
    with pytest.raises(SizeCapExceeded):
        tensor(np.eye(2), np.eye(2))


def test_tensor_power_zero_is_scalar_one():
    out = tensor_power(np.eye(3), 0)
    assert out.shape == (1, 1) and out[0, 0] == 1


def test_tensor_power_trace_multiplicativity(rng):
    rho = random_density(rng, 2)
    t3 = tensor_power(rho, 3)
    assert abs(np.trace(t3) - np.trace(rho) ** 3) < 1e-12


@given(st.integers(0, 5))
def test_tensor_power_dimensions(n):
    assert tensor_power(np.eye(2), n).shape == (max(2**n, 1), max(2**n, 1))


def test_partial_trace_of_product_state(rng):
    a = random_density(rng, 2)
    b = random_density(rng, 3)
    ab = np.kron(a, b)
    assert np.allclose(partial_trace(ab, [2, 3], 1), a, atol=1e-12)
    assert np.allclose(partial_trace(ab, [2, 3], 0), b, atol=1e-12)


def test_partial_trace_preserves_trace(rng):
    t = random_hermitian(rng, 8)
    reduced = partial_trace(t, [2, 2, 2], 1)
    assert abs(np.trace(reduced) - np.trace(t)) < 1e-10


def test_trace_out_last_agrees_with_partial_trace(rng):
    t = random_hermitian(rng, 6)
    assert np.allclose(trace_out_last(t, 2, 3), partial_trace(t, [2, 3], 1))


def test_eigh_reconstructs(rng):
    t = random_hermitian(rng, 5)
    w, v = eigh(t)
    assert np.allclose((v * w) @ v.conj().T, t, atol=1e-10)
    assert np.all(np.diff(w) >= 0)


def test_func_calculus_identity_function(rng):
    t = random_hermitian(rng, 4)
    assert np.allclose(func_calculus(t, lambda w: w), t, atol=1e-10)


def test_func_calculus_strict_raises_on_log_of_zero():
    with pytest.raises(FunctionDomainError):
        func_calculus(np.diag([1.0, 0.0]), np.log, strict=True)


def test_func_calculus_lenient_zeroes_bad_values():
    out = func_calculus(np.diag([np.e, 0.0]), np.log, strict=False)
    assert np.allclose(out, np.diag([1.0, 0.0]))


def test_herm_sqrt_squares_back(rng):
    rho = random_density(rng, 4)
    s = herm_sqrt(rho)
    assert np.allclose(s @ s, rho, atol=1e-10)


def test_herm_sqrt_handles_numerically_negative_zero():
    # an eigenvalue at -1e-12 is inside the PSD tolerance and maps to 0
    s = herm_sqrt(np.diag([1.0, -1e-12]))
    assert np.allclose(s, np.diag([1.0, 0.0]))


def test_herm_power_on_support(rng):
    rho = np.diag([0.5, 0.5, 0.0])
    out = herm_power(rho, -1.0)
    assert np.allclose(out, np.diag([2.0, 2.0, 0.0]))


def test_herm_log_base_two():
    out = herm_log(np.diag([4.0, 1.0]), base=2.0)
    assert np.allclose(out, np.diag([2.0, 0.0]))


def test_herm_log_excludes_kernel():
    out = herm_log(np.diag([1.0, 0.0]))
    assert np.allclose(out, np.zeros((2, 2)))


def test_op_norm_of_projector():
    assert op_norm(np.diag([1.0, 0.0])) == pytest.approx(1.0)


def test_trace_inner_norm_is_frobenius(rng):
    t = random_hermitian(rng, 4)
    assert trace_inner_norm(t) == pytest.approx(np.linalg.norm(t, "fro"))


def test_norms_pair(rng):
    t = random_hermitian(rng, 3)
    assert norms(t) == (op_norm(t), trace_inner_norm(t))


def test_normalize_unit_trace(rng):
    t = 0.3 * random_density(rng, 3)
    assert abs(np.trace(normalize(t)) - 1) < 1e-12


def test_normalize_zero_trace_raises():
    with pytest.raises(ZeroTrace):
        normalize(np.zeros((2, 2)))


def test_pinv_sqrt_inverts_on_support():
    t = np.diag([4.0, 0.0])
    out = pinv_sqrt(t)
    assert np.allclose(out, np.diag([0.5, 0.0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pinv_sqrt_whitens_full_rank_states(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 3) + 0.1 * np.eye(3)
    rho /= np.trace(rho).real
    s = pinv_sqrt(rho)
    assert np.allclose(s @ rho @ s, np.eye(3), atol=1e-8)
