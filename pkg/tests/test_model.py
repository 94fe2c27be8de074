import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import worked_pencil, worked_query
from structpencil import (
    Blocks,
    EigenPairQuery,
    InvalidPencil,
    InvalidQuery,
    InvalidScope,
    Perturbation,
    PerturbationScope,
    StructuredPencil,
    assemble_M,
    assemble_N,
    evaluate,
    random_structured_pencil,
    residual,
)
from structpencil.model import perturbation_matrices, perturbed_evaluate


def test_assembly_scalar_blocks():
    p = StructuredPencil(J=[[0]], R=[[1]], E=[[2]], B=[[3]], S=[[4]])
    M = assemble_M(p)
    N = assemble_N(p)
    np.testing.assert_array_equal(M, [[0, -1, 3], [-1, 0, 0], [3, 0, 4]])
    np.testing.assert_array_equal(N, [[0, 2, 0], [-2, 0, 0], [0, 0, 0]])


def test_assembly_worked_example():
    p = worked_pencil()
    M = assemble_M(p)
    assert M.shape == (7, 7)
    np.testing.assert_array_equal(M[:2, 2:4], [[0, -1], [1, -1]])
    np.testing.assert_array_equal(M[2:4, :2], [[0, 1], [-1, -1]])
    np.testing.assert_array_equal(M[4:, 4:], np.eye(3))
    assert not assemble_N(p).any()


def test_worked_example_residual():
    assert residual(worked_pencil(), worked_query()) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_even_identity(seed):
    p = random_structured_pencil(3, 2, seed)
    M, N = assemble_M(p), assemble_N(p)
    assert np.allclose(M, M.conj().T, atol=1e-12)
    assert np.allclose(N, -N.conj().T, atol=1e-12)
    rng = np.random.default_rng(seed)
    for z in rng.standard_normal(10) + 1j * rng.standard_normal(10):
        L = evaluate(p, z)
        np.testing.assert_allclose(L.conj().T, evaluate(p, -np.conj(z)), atol=1e-12)


def test_rejects_non_skew_J():
    with pytest.raises(InvalidPencil, match="J"):
        StructuredPencil(J=[[1]], R=[[1]], E=[[0]], B=[[0]], S=[[1]])


def test_rejects_non_hermitian_R_and_E():
    with pytest.raises(InvalidPencil, match="R"):
        StructuredPencil(J=[[0, 0], [0, 0]], R=[[0, 1], [0, 0]], E=np.zeros((2, 2)), B=np.zeros((2, 1)), S=[[1]])
    with pytest.raises(InvalidPencil, match="E"):
        StructuredPencil(J=[[0]], R=[[0]], E=[[1j]], B=[[0]], S=[[1]])


def test_rejects_indefinite_S():
    with pytest.raises(InvalidPencil, match="positive definite"):
        StructuredPencil(J=[[0]], R=[[0]], E=[[0]], B=[[0]], S=[[-1]])


def test_rejects_bad_shapes_and_nan():
    with pytest.raises(InvalidPencil):
        StructuredPencil(J=np.zeros((2, 2)), R=np.zeros((2, 2)), E=np.zeros((3, 3)), B=np.zeros((2, 1)), S=[[1]])
    with pytest.raises(InvalidPencil):
        StructuredPencil(J=[[0]], R=[[np.nan]], E=[[0]], B=[[0]], S=[[1]])


def test_pencil_arrays_are_read_only():
    p = worked_pencil()
    with pytest.raises(ValueError):
        p.J[0, 0] = 1


@pytest.mark.parametrize("lam", [0.0, 1.0, 0.5 + 1j])
def test_query_rejects_non_imaginary_lambda(lam):
    with pytest.raises(InvalidQuery):
        EigenPairQuery(lam, [1], [1], [0])


def test_query_snaps_tiny_real_part():
    q = EigenPairQuery(1e-14 + 1j, [1], [1], [0])
    assert q.lam == 1j


def test_query_rejects_zero_vector_and_mismatch():
    with pytest.raises(InvalidQuery):
        EigenPairQuery(1j, [0], [0], [0])
    with pytest.raises(InvalidQuery):
        EigenPairQuery(1j, [1, 0], [1], [0])
    with pytest.raises(InvalidQuery):
        EigenPairQuery(1j, [1], [1], [0, 0]).check_dims(StructuredPencil(J=[[0]], R=[[0]], E=[[0]], B=[[0]], S=[[1]]))


@pytest.mark.parametrize("text", ["JE", "EJ", "ej", "BRJ"])
def test_blocks_parse_any_order(text):
    assert Blocks.parse(text).letters == frozenset(text.upper())


def test_scope_validation():
    PerturbationScope("RE", "sym")
    PerturbationScope("JRB", "sym", "real")
    with pytest.raises(InvalidScope):
        PerturbationScope("JB", "sym")
    with pytest.raises(InvalidScope):
        PerturbationScope("JE", "block", "real")
    with pytest.raises(ValueError):
        Blocks.parse("JX")
    assert PerturbationScope("RE", "sym").is_bounds
    assert not PerturbationScope("JR", "sym").is_bounds


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), t=st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3))
def test_perturbation_matrices_keep_evenness(seed, t):
    rng = np.random.default_rng(seed)
    n, m = 3, 2
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    delta = Perturbation.from_parts(n, m, dJ=(G - G.conj().T) / 2, dR=(H + H.conj().T) / 2)
    dM, dN = perturbation_matrices(delta, n, m)
    assert np.allclose(dM, dM.conj().T)
    assert np.allclose(dN, -dN.conj().T)
    p = random_structured_pencil(n, m, seed)
    lam = 1j * t
    np.testing.assert_allclose(perturbed_evaluate(p, delta, lam), evaluate(p, lam) - (dM + lam * dN), atol=1e-12)


def test_perturbation_norm():
    d = Perturbation.from_parts(2, 1, dJ=np.array([[0, 1], [-1, 0]]), dB=np.array([[1], [1]]))
    assert d.norm() == pytest.approx(2.0)
