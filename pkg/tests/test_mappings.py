import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structpencil import (
    DegenerateInput,
    NoSolution,
    RankDeficient,
    pseudoinverse,
    real_two_sided_minimal_map,
    skew_hermitian_minimal_map,
    two_sided_minimal_map,
)

seeds = st.integers(0, 2**32 - 1)


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, rows=st.integers(1, 5), cols=st.integers(1, 5), rank=st.integers(0, 5))
def test_pseudoinverse_penrose(seed, rows, cols, rank):
    rng = np.random.default_rng(seed)
    k = min(rank, rows, cols)
    A = cgauss(rng, rows, k) @ cgauss(rng, k, cols)
    P = pseudoinverse(A)
    assert P.shape == (cols, rows)
    tol = 1e-9 * (1 + np.linalg.norm(A)) * (1 + np.linalg.norm(P))
    assert np.linalg.norm(A @ P @ A - A) <= tol
    assert np.linalg.norm(P @ A @ P - P) <= tol
    assert np.linalg.norm((A @ P).conj().T - A @ P) <= tol
    assert np.linalg.norm((P @ A).conj().T - P @ A) <= tol


def test_pseudoinverse_of_zero():
    np.testing.assert_array_equal(pseudoinverse(np.zeros((2, 3))), np.zeros((3, 2)))


# ---------------------------------------------------------------- skew-Hermitian map


def test_skew_map_hand_example():
    sol = skew_hermitian_minimal_map([[1], [0]], [[1j], [0]])
    np.testing.assert_allclose(sol.delta, [[1j, 0], [0, 0]], atol=1e-15)
    assert sol.fro_norm == pytest.approx(1.0)
    assert sol.diagnostics["closed_form_norm"] == pytest.approx(1.0)


def test_skew_map_rejects_hermitian_data():
    with pytest.raises(NoSolution) as info:
        skew_hermitian_minimal_map([[1], [0]], [[1], [0]])
    assert "Y^H X" in info.value.condition
    assert info.value.residual > info.value.threshold
    sol = skew_hermitian_minimal_map([[1], [0]], [[1], [0]], raise_on_failure=False)
    assert not sol.exists and sol.delta is None


def test_skew_map_rejects_range_violation():
    X = np.array([[1, 1], [0, 0]], dtype=complex)
    Y = np.array([[0, 1j], [1, 0]], dtype=complex)
    with pytest.raises(NoSolution, match="X\\^\\+ X"):
        skew_hermitian_minimal_map(X, Y)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 6), k=st.integers(1, 4))
def test_skew_map_properties(seed, n, k):
    rng = np.random.default_rng(seed)
    G = cgauss(rng, n, n)
    D0 = (G - G.conj().T) / 2
    X = cgauss(rng, n, k)
    Y = D0 @ X
    sol = skew_hermitian_minimal_map(X, Y)
    D = sol.delta
    assert np.linalg.norm(D @ X - Y) <= 1e-10 * (1 + np.linalg.norm(Y))
    assert np.linalg.norm(D + D.conj().T) <= 1e-10 * max(1, sol.fro_norm)
    assert abs(sol.diagnostics["closed_form_norm"] - sol.fro_norm) <= 1e-10 * max(1, sol.fro_norm)
    assert sol.fro_norm <= np.linalg.norm(D0) + 1e-10
    Pi = np.eye(n) - X @ pseudoinverse(X)
    for _ in range(10):
        W = cgauss(rng, n, n)
        assert np.linalg.norm(D + Pi @ ((W - W.conj().T) / 2) @ Pi) >= sol.fro_norm - 1e-10


# ---------------------------------------------------------------- two-sided map


def test_two_sided_hand_example():
    e1, e2 = np.eye(2)
    sol = two_sided_minimal_map(e1, e2, e1, e2)
    np.testing.assert_allclose(sol.delta, [[0, 1], [1, 0]], atol=1e-15)
    assert sol.fro_norm == pytest.approx(np.sqrt(2))
    assert sol.spectral_inf == pytest.approx(1.0)


def test_two_sided_incompatible():
    e1 = np.array([1.0, 0.0])
    with pytest.raises(NoSolution, match="u\\^H s"):
        two_sided_minimal_map(e1, e1, e1, 2 * e1)


def test_two_sided_degenerate():
    with pytest.raises(DegenerateInput):
        two_sided_minimal_map(np.zeros(2), np.zeros(2), [1, 0], [0, 0])


def test_two_sided_norm_diagnostics():
    # |u||w| != 1 and s^H u != 0 separates the two radicals
    u = np.array([2.0, 0.0])
    w = np.array([1.0, 1.0])
    D0 = np.array([[1.0, 2.0], [3.0, -1.0]])
    sol = two_sided_minimal_map(u, D0 @ u, w, D0.T @ w)
    assert sol.diagnostics["norm_squared_denominators"] == pytest.approx(sol.fro_norm, rel=1e-12)
    assert sol.diagnostics["single_denominator_mismatch"]


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 6), m=st.integers(1, 6))
def test_two_sided_properties(seed, n, m):
    rng = np.random.default_rng(seed)
    D0 = cgauss(rng, n, m)
    u, w = cgauss(rng, m), cgauss(rng, n)
    r, s = D0 @ u, D0.conj().T @ w
    sol = two_sided_minimal_map(u, r, w, s)
    D = sol.delta
    assert np.linalg.norm(D @ u - r) <= 1e-10 * (1 + np.linalg.norm(r))
    assert np.linalg.norm(D.conj().T @ w - s) <= 1e-10 * (1 + np.linalg.norm(s))
    assert sol.diagnostics["norm_squared_denominators"] == pytest.approx(sol.fro_norm, rel=1e-10, abs=1e-12)
    assert np.linalg.norm(D, 2) >= sol.spectral_inf - 1e-10
    Pw = np.eye(n) - np.outer(w, w.conj()) / np.vdot(w, w).real
    Pu = np.eye(m) - np.outer(u, u.conj()) / np.vdot(u, u).real
    for _ in range(10):
        assert np.linalg.norm(D + Pw @ cgauss(rng, n, m) @ Pu) >= sol.fro_norm - 1e-10


# ---------------------------------------------------------------- real two-sided map


def test_real_map_hand_example_has_no_solution():
    v = np.array([1, 1j])
    with pytest.raises(NoSolution):
        real_two_sided_minimal_map(v, v, v, v.conj())


def test_real_map_needs_genuinely_complex_vectors():
    with pytest.raises(RankDeficient):
        real_two_sided_minimal_map([1.0, 2.0], [0, 0], [1j, 1], [0, 0])
    with pytest.raises(RankDeficient):
        real_two_sided_minimal_map([1j, 1], [0, 0], [(1 + 1j), 2 + 2j], [0, 0])


def test_real_map_transpose_condition():
    rng = np.random.default_rng(3)
    D0 = rng.standard_normal((3, 3))
    u, w = cgauss(rng, 3), cgauss(rng, 3)
    r, s = D0 @ u, D0.T @ w
    # a complex phase keeps u^H s = r^H w but breaks the transpose relation
    with pytest.raises(NoSolution, match="u\\^T s"):
        real_two_sided_minimal_map(u, r * 1j, w, s * -1j)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(2, 6), m=st.integers(2, 6))
def test_real_map_properties(seed, n, m):
    rng = np.random.default_rng(seed)
    D0 = rng.standard_normal((n, m))
    u, w = cgauss(rng, m), cgauss(rng, n)
    r, s = D0 @ u, D0.T @ w
    sol = real_two_sided_minimal_map(u, r, w, s)
    assert sol.diagnostics["max_imag"] <= 1e-10 * max(1, sol.fro_norm)
    D = sol.delta.real
    assert np.linalg.norm(D @ u - r) <= 1e-10 * (1 + np.linalg.norm(r))
    assert np.linalg.norm(D.T @ w - s) <= 1e-10 * (1 + np.linalg.norm(s))
    assert sol.fro_norm <= np.linalg.norm(D0) + 1e-10
    # real null-space directions keep feasibility and never reduce the norm
    U = np.column_stack([u.real, u.imag])
    W = np.column_stack([w.real, w.imag])
    Pu = np.eye(m) - U @ np.linalg.pinv(U)
    Pw = np.eye(n) - W @ np.linalg.pinv(W)
    for _ in range(10):
        assert np.linalg.norm(D + Pw @ rng.standard_normal((n, m)) @ Pu) >= sol.fro_norm - 1e-10
