import numpy as np
import pytest

from structpencil import (
    EigenPairQuery,
    EmptyKernel,
    Infeasible,
    OracleConfig,
    PerturbationScope,
    admissible_query,
    backward_error,
    certify_eigenvalue,
    eigenvalue_minimizer,
    eta_block_eigenvalue,
    least_norm_feasible,
    planted_instance,
    random_structured_pencil,
)
from structpencil.model import evaluate
from structpencil.oracle import finite_spectrum, oracle_solve
from structpencil.reports import all_scopes


def test_generator_is_deterministic():
    a = random_structured_pencil(4, 3, 11)
    b = random_structured_pencil(4, 3, 11)
    for (name, x), (_, y) in zip(a.blocks().items(), b.blocks().items()):
        np.testing.assert_array_equal(x, y, err_msg=name)
    qa, qb = admissible_query(a, 5), admissible_query(b, 5)
    assert qa.lam == qb.lam
    np.testing.assert_array_equal(qa.x, qb.x)


@pytest.mark.parametrize("seed", range(5))
def test_generator_is_strictly_passive(seed):
    p = random_structured_pencil(4, 3, seed)
    assert np.all(np.abs(finite_spectrum(p).real) > 1e-6)
    assert np.linalg.eigvalsh(p.R).min() >= -1e-12


def test_real_generator():
    p = random_structured_pencil(3, 2, 0, real=True)
    assert p.is_real


def test_empty_kernel_for_definite_R():
    p = random_structured_pencil(3, 2, 0, r_rank=3)
    with pytest.raises(EmptyKernel):
        admissible_query(p, 0)


@pytest.mark.parametrize("seed", range(5))
def test_admissible_query_is_finite_everywhere(seed):
    p = random_structured_pencil(4, 3, seed)
    q = admissible_query(p, seed)
    assert not q.x3.any()
    assert 0.05 <= abs(q.lam.imag) <= 3
    for scope in all_scopes():
        assert backward_error(scope, p, q).is_finite, scope.label


def test_scope_restricted_query():
    p = random_structured_pencil(4, 3, 0, r_rank=4)
    q = admissible_query(p, 0, "JE")
    assert backward_error("JE", p, q).is_finite


def test_oracle_matches_planted_bound():
    scope = PerturbationScope("JE")
    p, q, d0 = planted_instance(3, 2, scope, 0)
    res = oracle_solve(scope, p, q, OracleConfig())
    assert res.value <= d0.norm() + 1e-10
    assert res.residual <= 1e-9
    assert res.perturbation.norm() == pytest.approx(res.value, rel=1e-12)


def test_oracle_restarts_do_not_change_value():
    scope = PerturbationScope("REB", "sym")
    p, q, _ = planted_instance(3, 2, scope, 1)
    a = least_norm_feasible(scope, None, p, q, OracleConfig(restarts=1))
    b = least_norm_feasible(scope, None, p, q, OracleConfig(restarts=5, seed=3))
    assert a == pytest.approx(b, rel=1e-9)


def test_oracle_detects_infeasible():
    p = random_structured_pencil(3, 2, 0)
    q = EigenPairQuery(1j, np.ones(3), np.ones(3), [1.0, 0.0])
    with pytest.raises(Infeasible):
        least_norm_feasible("JB", "block", p, q)


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(restarts=0)
    with pytest.raises(ValueError):
        OracleConfig(tol_opt=0)


@pytest.mark.parametrize("blocks", ["JE", "JR", "JB", "JRB", "EB"])
def test_eigenvalue_minimizer_certified(blocks):
    p = random_structured_pencil(4, 3, 2)
    lam = 0.7j
    delta, x = eigenvalue_minimizer(PerturbationScope(blocks), p, lam)
    assert certify_eigenvalue(p, delta, lam) <= 1e-10 * np.linalg.norm(evaluate(p, lam))
    assert np.linalg.norm(x) == pytest.approx(1.0)
    assert delta.norm() == pytest.approx(eta_block_eigenvalue(blocks, p, lam), rel=1e-10)
