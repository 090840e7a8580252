import numpy as np
import pytest
import scipy.sparse as sp

from fmes.sparse import (ConvergenceError, LinearOperator, as_operator,
                         cg_solve, compose_shifted)


def test_identity_converges_in_one_iteration(rng):
    b = rng.standard_normal(12)
    x, report = cg_solve(sp.eye(12, format="csr"), b, tol=1e-12)
    assert x == pytest.approx(b, rel=1e-12)
    assert report.iterations == 1
    assert report.converged


def test_diagonal_solve():
    n = 9
    d = np.arange(1.0, n + 1)
    x, report = cg_solve(sp.diags(d), np.ones(n), tol=1e-13)
    assert x == pytest.approx(1.0 / d, rel=1e-12)
    assert report.converged


def test_mass_solve_recovers_ones(sys6):
    ones = np.ones(sys6.n_nodes)
    rhs = sys6.M @ ones
    x, report = cg_solve(sys6.M, rhs, tol=1e-12)
    assert x == pytest.approx(ones, rel=1e-9)
    assert report.converged and report.relative_residual <= 1e-12


def test_zero_rhs():
    x, report = cg_solve(sp.eye(5, format="csr"), np.zeros(5), tol=1e-10)
    assert np.all(x == 0.0)
    assert report.converged and report.iterations == 0


def test_warm_start_already_converged(sys6):
    ones = np.ones(sys6.n_nodes)
    rhs = sys6.M @ ones
    x, report = cg_solve(sys6.M, rhs, tol=1e-8, x0=ones)
    assert report.iterations == 0
    assert x == pytest.approx(ones, abs=0)


def test_converged_reports_satisfy_tolerance(sys26, rng):
    for tol in (1e-6, 1e-10, 1e-12):
        rhs = rng.standard_normal(sys26.n_nodes)
        _, report = cg_solve(sys26.K, rhs, tol=tol)
        assert report.converged
        assert report.relative_residual <= tol


def test_nonconvergence_raises_with_report(sys26, rng):
    rhs = rng.standard_normal(sys26.n_nodes)
    with pytest.raises(ConvergenceError) as exc:
        cg_solve(sys26.K, rhs, tol=1e-12, max_iter=3)
    report = exc.value.report
    assert report is not None
    assert not report.converged
    assert report.iterations == 3
    assert report.relative_residual > 1e-12


def test_indefinite_operator_raises():
    A = sp.diags([1.0, -1.0]).tocsr()
    with pytest.raises(ConvergenceError):
        cg_solve(A, np.array([0.0, 1.0]), tol=1e-10)


def test_rhs_shape_validation(sys6):
    with pytest.raises(ValueError):
        cg_solve(sys6.M, np.ones(3), tol=1e-10)
    with pytest.raises(ValueError):
        cg_solve(sys6.M, np.ones(sys6.n_nodes), tol=0.0)


def test_linear_operator_linearity(sys6, rng):
    # composite matrix-free operator stays linear within rounding
    M, K = sys6.M, sys6.K

    def apply(v):
        y, _ = cg_solve(M, K @ v, tol=1e-13)
        return K @ v + 0.5 * (K @ y)

    op = LinearOperator(dimension=sys6.n_nodes, apply=apply)
    u = rng.standard_normal(sys6.n_nodes)
    v = rng.standard_normal(sys6.n_nodes)
    lhs = op(2.0 * u - 3.0 * v)
    rhs = 2.0 * op(u) - 3.0 * op(v)
    scale = max(np.abs(lhs).max(), 1.0)
    assert lhs == pytest.approx(rhs, abs=1e-9 * scale)


def test_as_operator_passthrough_and_wrap(sys6):
    op = as_operator(sys6.M)
    assert op.dimension == sys6.n_nodes
    assert as_operator(op) is op
    v = np.ones(sys6.n_nodes)
    assert op(v) == pytest.approx(sys6.M @ v, abs=0)


def test_compose_shifted_zero_shift(sys6):
    diff = (compose_shifted(sys6.K, sys6.M, 0.0) - sys6.K).tocoo()
    assert diff.nnz == 0 or np.abs(diff.data).max() == 0.0


def test_compose_shifted_scalar_case():
    K = sp.csr_matrix(np.array([[3.0]]))
    M = sp.csr_matrix(np.array([[1.0]]))
    assert compose_shifted(K, M, 3.0).toarray()[0, 0] == 0.0


def test_compose_shifted_annihilates_fundamental_mode(sys6, pair6):
    # the leftover is exactly the eigensolver residual
    Kt = compose_shifted(sys6.K_bar, sys6.M, pair6.lambda1_bar)
    residual = np.linalg.norm(Kt @ pair6.phi1)
    assert residual == pytest.approx(pair6.residual, rel=1e-9)
    assert residual <= 1e-7


def test_compose_shifted_dimension_mismatch(sys6):
    with pytest.raises(ValueError):
        compose_shifted(sys6.K, sp.eye(3, format="csr"), 1.0)


def test_shifted_nonnegative_after_projection(sys6, pair6, rng):
    Kt = compose_shifted(sys6.K_bar, sys6.M, pair6.lambda1_bar)
    M, phi = sys6.M, pair6.phi1
    for _ in range(100):
        v = rng.standard_normal(sys6.n_nodes)
        v = v - (phi @ (M @ v)) * phi       # project out the fundamental mode
        assert v @ (Kt @ v) >= -1e-8 * (v @ (M @ v))
