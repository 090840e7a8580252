"""Symmetric sparse solves and operator composition.

The conjugate gradient loop is written out explicitly (instead of calling
into a library) so that the iteration count, the reported residual and the
failure behaviour are fully under our control and runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    relative_residual: float
    converged: bool


class ConvergenceError(RuntimeError):
    """An iterative solve failed to reach its tolerance.

    Carries the final ``report`` (and, for eigensolves, the eigenvalue
    ``history``) so callers can inspect how far the iteration got.
    """

    def __init__(self, message: str, report: SolveReport | None = None,
                 history: list[float] | None = None):
        super().__init__(message)
        self.report = report
        self.history = history


@dataclass(frozen=True)
class LinearOperator:
    """Matrix-free symmetric operator: a dimension plus an apply callback.

    ``diagonal`` is optional; when present it enables Jacobi preconditioning
    in :func:`cg_solve`.
    """

    dimension: int
    apply: Callable[[np.ndarray], np.ndarray]
    diagonal: np.ndarray | None = None

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.apply(v)


def as_operator(a) -> LinearOperator:
    """Wrap a sparse/dense matrix (or pass through an operator) for cg_solve."""
    if isinstance(a, LinearOperator):
        return a
    mat = sp.csr_matrix(a)
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"operator must be square, got shape {mat.shape}")
    return LinearOperator(dimension=mat.shape[0],
                          apply=lambda v: mat @ v,
                          diagonal=mat.diagonal().copy())


def jacobi_preconditioner(op: LinearOperator) -> Callable[[np.ndarray], np.ndarray] | None:
    """Diagonal preconditioner from the operator's diagonal, if available."""
    if op.diagonal is None:
        return None
    inv = 1.0 / np.where(op.diagonal == 0.0, 1.0, op.diagonal)
    return lambda r: inv * r


def cg_solve(op, rhs: np.ndarray, tol: float = 1e-10, max_iter: int | None = None,
             *, x0: np.ndarray | None = None,
             precondition: Callable[[np.ndarray], np.ndarray] | None = None,
             ) -> tuple[np.ndarray, SolveReport]:
    """Preconditioned conjugate gradients for a symmetric positive definite op.

    Parameters
    ----------
    op : sparse matrix or LinearOperator
    rhs : right-hand side vector
    tol : relative residual tolerance, ||op x - rhs|| <= tol ||rhs||; the
        residual is the standard CG recurrence estimate, which near machine
        precision can understate the true residual by a small factor
    max_iter : iteration cap (default scales with the dimension)
    x0 : optional warm start
    precondition : optional callback applying an SPD preconditioner inverse;
        defaults to Jacobi when the operator exposes its diagonal.

    Returns
    -------
    (solution, SolveReport)

    Raises
    ------
    ConvergenceError
        If the tolerance is not met within max_iter iterations.  The partial
        solution is not returned; the report rides on the exception.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    a = as_operator(op)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (a.dimension,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({a.dimension},)")
    if max_iter is None:
        max_iter = max(1000, 20 * a.dimension)
    if precondition is None:
        precondition = jacobi_preconditioner(a)

    b_norm = float(np.linalg.norm(rhs))
    if b_norm == 0.0:
        return np.zeros_like(rhs), SolveReport(0, 0.0, True)

    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=float)
    r = rhs - a(x)
    z = precondition(r) if precondition is not None else r
    p = z.copy()
    rz = float(r @ z)

    for iterations in range(max_iter + 1):
        res = float(np.linalg.norm(r))
        if res <= tol * b_norm:
            return x, SolveReport(iterations, res / b_norm, True)
        if iterations == max_iter:
            break
        ap = a(p)
        pap = float(p @ ap)
        if pap <= 0.0:
            raise ConvergenceError(
                "operator is not positive definite (p^T A p <= 0 in CG)",
                report=SolveReport(iterations, res / b_norm, False))
        alpha = rz / pap
        x = x + alpha * p
        r = r - alpha * ap
        z = precondition(r) if precondition is not None else r
        rz_next = float(r @ z)
        p = z + (rz_next / rz) * p
        rz = rz_next

    report = SolveReport(max_iter, float(np.linalg.norm(r)) / b_norm, False)
    raise ConvergenceError(
        f"CG did not reach tol={tol:g} in {max_iter} iterations "
        f"(relative residual {report.relative_residual:.3e})", report=report)


def compose_shifted(K: sp.spmatrix, M: sp.spmatrix, lambda1: float) -> sp.csr_matrix:
    """Shifted stiffness K - lambda1 * M.

    Subtracting the identity at operator level corresponds to subtracting the
    mass matrix at matrix level; with lambda1 the fundamental eigenvalue the
    result is symmetric positive semidefinite up to eigensolver error.
    """
    if K.shape != M.shape:
        raise ValueError(f"shape mismatch: K {K.shape} vs M {M.shape}")
    return (K - lambda1 * M).tocsr()
