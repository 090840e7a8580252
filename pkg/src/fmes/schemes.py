"""Two-level time steppers for the semi-discrete parabolic problem.

Four families are provided:

* ``theta_standard``   -- the classical weighted scheme,
  (M + sigma tau K) y' = (M - (1-sigma) tau K) y.
* ``theta_fmes``       -- the same scheme applied to the shifted operator
  K - lambda1 M, with the new level scaled by exp(lambda1 tau).  The
  fundamental mode is then propagated exactly: its amplitude gains the
  factor exp(-lambda1 tau) per step regardless of tau.
* ``pade_fmes``        -- rational one-step methods built from Pade
  approximants of exp(-z), applied to the shifted operator.  Index (0,1)
  coincides with theta_fmes at sigma=1, (1,1) with sigma=0.5, and (0,2)
  is a second-order scheme that additionally keeps every mode multiplier
  positive (spectral monotonicity).
* ``pade_modal``       -- the same rational multipliers applied mode by
  mode through a dense eigenbasis; exact in space, it serves as the
  oracle for all sparse steppers and covers arbitrary Pade indices.

Scalar helpers (amplification factor, exact-weight formula, Pade
coefficients) live here as well since they define the steppers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .assembly import FemSystem
from .sparse import ConvergenceError, LinearOperator, cg_solve, compose_shifted
from .spectral import ModalBasis

SCHEME_KINDS = ("theta_standard", "theta_fmes", "pade_fmes", "pade_modal")
SPARSE_PADE_INDICES = ((0, 1), (1, 1), (0, 2))

OUTER_TOL_DEFAULT = 1e-10
MASS_TOL_DEFAULT = 1e-12


# ---------------------------------------------------------------------------
# scalar layer
# ---------------------------------------------------------------------------

def amplification_factor(sigma: float, eta: float) -> float:
    """Per-mode multiplier r(sigma, eta) = (1 - (1-sigma) eta) / (1 + sigma eta)."""
    denom = 1.0 + sigma * eta
    if denom == 0.0:
        raise ValueError(f"amplification factor has a pole at sigma*eta = -1 "
                         f"(sigma={sigma}, eta={eta})")
    return (1.0 - (1.0 - sigma) * eta) / denom


def fmes_weight(eta: float) -> float:
    """The weight making the two-level scheme exact for a mode with eta = lambda tau.

    Solves r(sigma, eta) = exp(-eta) in closed form,
    sigma = 1/(1 - exp(-eta)) - 1/eta.  The removable singularity at eta = 0
    has limit 1/2, which is documented but not returned; eta = 0 raises.
    """
    if eta == 0.0:
        raise ValueError("eta must be nonzero (the limit value is 1/2)")
    if abs(eta) < 1e-4:
        # series around 0 avoids cancellation: 1/2 + eta/12 - eta^3/720 + ...
        return 0.5 + eta / 12.0 - eta ** 3 / 720.0
    return 1.0 / (-math.expm1(-eta)) - 1.0 / eta


def pade_coefficients(l: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (ascending powers) of the [l/m] Pade approximant of exp(-z).

    P(z) = l!/(l+m)! * sum_k (l+m-k)!/(k! (l-k)!) (-z)^k and Q analogously
    with positive powers; R = P/Q matches exp(-z) to order l+m+1.
    """
    if not (isinstance(l, int) and isinstance(m, int)):
        raise ValueError("Pade indices must be integers")
    if l < 0 or m < 0:
        raise ValueError(f"Pade indices must be nonnegative, got ({l}, {m})")
    if l + m < 1:
        raise ValueError("at least one of l, m must be positive")
    fact = math.factorial
    p = [(-1) ** k * Fraction(fact(l) * fact(l + m - k),
                              fact(l + m) * fact(k) * fact(l - k))
         for k in range(l + 1)]
    q = [Fraction(fact(m) * fact(l + m - k),
                  fact(l + m) * fact(k) * fact(m - k))
         for k in range(m + 1)]
    return (np.array([float(c) for c in p]),
            np.array([float(c) for c in q]))


def pade_rational(l: int, m: int, z):
    """Evaluate R_lm(z) = P_lm(z) / Q_lm(z); accepts scalars or arrays."""
    p, q = pade_coefficients(l, m)
    z = np.asarray(z, dtype=float)
    return np.polyval(p[::-1], z) / np.polyval(q[::-1], z)


# ---------------------------------------------------------------------------
# scheme specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeSpec:
    """Identity and parameters of one time-stepping run.

    theta kinds need ``sigma``; pade kinds need ``l`` and ``m``; all shifted
    (FMES) kinds need ``lambda1``, normally the discrete fundamental
    eigenvalue from the spectral module.  ``n_steps = 0`` is allowed and
    yields the degenerate one-entry trajectory.
    """

    kind: str
    tau: float
    n_steps: int
    sigma: float | None = None
    l: int | None = None
    m: int | None = None
    lambda1: float | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}; "
                             f"expected one of {SCHEME_KINDS}")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be nonnegative")
        if self.kind in ("theta_standard", "theta_fmes"):
            if self.sigma is None or not (0.0 < self.sigma <= 1.0):
                raise ValueError("theta schemes need a weight sigma in (0, 1]")
        else:
            if self.l is None or self.m is None:
                raise ValueError("Pade schemes need indices l and m")
            if self.l < 0 or self.m < 0 or self.l + self.m < 1:
                raise ValueError(f"invalid Pade indices ({self.l}, {self.m})")
            if self.kind == "pade_fmes" and (self.l, self.m) not in SPARSE_PADE_INDICES:
                raise ValueError(
                    f"sparse Pade stepping supports (l, m) in "
                    f"{SPARSE_PADE_INDICES}; use the modal path for "
                    f"({self.l}, {self.m})")
        if self.kind != "theta_standard" and self.lambda1 is None:
            raise ValueError(f"{self.kind} needs lambda1 (fundamental eigenvalue)")

    def params_label(self) -> str:
        if self.kind in ("theta_standard", "theta_fmes"):
            return f"sigma{self.sigma:g}"
        return f"l{self.l}m{self.m}"


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------

class _MatrixPairStepper:
    """Advance by solving A_impl y' = scale * (A_expl @ y)."""

    def __init__(self, A_impl: sp.csr_matrix, A_expl: sp.csr_matrix,
                 scale: float, tol: float):
        self.A_impl = A_impl.tocsr()
        self.A_expl = A_expl.tocsr()
        self.scale = scale
        self.tol = tol

    def step(self, y: np.ndarray) -> np.ndarray:
        rhs = self.scale * (self.A_expl @ y)
        x, _ = cg_solve(self.A_impl, rhs, tol=self.tol, x0=self.scale * y)
        return x


class _CompositePadeStepper:
    """The (0, 2) shifted stepper: solve (M + tau Kt + tau^2/2 Kt M^-1 Kt) y' = scale M y.

    The composite operator is kept matrix-free.  It is preconditioned by
    S M^-1 S with S = M + (tau/sqrt(2)) Kt, whose spectrum relative to the
    operator lies in [0.85, 1], so the outer CG converges in a handful of
    iterations however stiff the problem.  With a lumped (diagonal) mass the
    composite matrix is assembled explicitly instead.
    """

    def __init__(self, sys: FemSystem, tau: float, lambda1: float,
                 q: np.ndarray, tol: float, mass_tol: float):
        M = sys.M
        Kt = compose_shifted(sys.K, M, lambda1)
        self.scale = math.exp(-lambda1 * tau)
        self.tol = tol
        self.M = M
        if sys.lumped:
            d_inv = 1.0 / M.diagonal()
            B = (q[0] * M + q[1] * tau * Kt
                 + q[2] * tau * tau * (Kt @ sp.diags(d_inv) @ Kt)).tocsr()
            self.op = B
            self.precondition = None            # Jacobi from the matrix diagonal
        else:
            n = M.shape[0]
            S = (M + math.sqrt(q[2]) * tau * Kt).tocsr()
            mass_diag = M.diagonal()

            def apply(v: np.ndarray) -> np.ndarray:
                kv = Kt @ v
                minv_kv, _ = cg_solve(M, kv, tol=mass_tol)
                return q[0] * (M @ v) + q[1] * tau * kv \
                    + q[2] * tau * tau * (Kt @ minv_kv)

            def precondition(r: np.ndarray) -> np.ndarray:
                u, _ = cg_solve(S, r, tol=mass_tol)
                w, _ = cg_solve(S, self.M @ u, tol=mass_tol)
                return w

            self.op = LinearOperator(dimension=n, apply=apply,
                                     diagonal=mass_diag)
            self.precondition = precondition

    def step(self, y: np.ndarray) -> np.ndarray:
        rhs = self.scale * (self.M @ y)
        x, _ = cg_solve(self.op, rhs, tol=self.tol, x0=self.scale * y,
                        precondition=self.precondition)
        return x


class _ModalStepper:
    """Apply exp(-lambda1 tau) R_lm((lambda_k - lambda1) tau) mode by mode."""

    def __init__(self, basis: ModalBasis, l: int, m: int, tau: float,
                 lambda1: float):
        shifted = (basis.eigenvalues - lambda1) * tau
        self.multipliers = math.exp(-lambda1 * tau) * pade_rational(l, m, shifted)
        self.basis = basis

    def step(self, y: np.ndarray) -> np.ndarray:
        coeffs = self.basis.eigenvectors.T @ (self.basis.mass @ y)
        return self.basis.eigenvectors @ (self.multipliers * coeffs)


def make_stepper(spec: SchemeSpec, sys: FemSystem, *,
                 basis: ModalBasis | None = None,
                 tol: float = OUTER_TOL_DEFAULT,
                 mass_tol: float = MASS_TOL_DEFAULT):
    """Build the cached stepper object for a scheme specification."""
    tau = spec.tau
    if spec.kind == "theta_standard":
        s = spec.sigma
        return _MatrixPairStepper(sys.M + s * tau * sys.K,
                                  sys.M - (1.0 - s) * tau * sys.K,
                                  1.0, tol)
    if spec.kind == "theta_fmes":
        s = spec.sigma
        Kt = compose_shifted(sys.K, sys.M, spec.lambda1)
        return _MatrixPairStepper(sys.M + s * tau * Kt,
                                  sys.M - (1.0 - s) * tau * Kt,
                                  math.exp(-spec.lambda1 * tau), tol)
    if spec.kind == "pade_fmes":
        p, q = pade_coefficients(spec.l, spec.m)
        if spec.m <= 1:
            Kt = compose_shifted(sys.K, sys.M, spec.lambda1)
            A_impl = q[0] * sys.M + q[1] * tau * Kt
            A_expl = p[0] * sys.M + (p[1] * tau * Kt if spec.l >= 1 else 0.0 * Kt)
            return _MatrixPairStepper(A_impl, A_expl,
                                      math.exp(-spec.lambda1 * tau), tol)
        return _CompositePadeStepper(sys, tau, spec.lambda1, q, tol, mass_tol)
    if spec.kind == "pade_modal":
        if basis is None:
            raise ValueError("pade_modal needs a ModalBasis")
        return _ModalStepper(basis, spec.l, spec.m, tau, spec.lambda1)
    raise ValueError(f"unknown scheme kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# one-shot step operations
# ---------------------------------------------------------------------------

def theta_step_standard(sys: FemSystem, sigma: float, tau: float,
                        y_n: np.ndarray, *, tol: float = OUTER_TOL_DEFAULT,
                        ) -> np.ndarray:
    """One step of the standard weighted scheme."""
    spec = SchemeSpec("theta_standard", tau=tau, n_steps=1, sigma=sigma)
    return make_stepper(spec, sys, tol=tol).step(np.asarray(y_n, dtype=float))


def theta_step_fmes(sys: FemSystem, sigma: float, tau: float, lambda1: float,
                    y_n: np.ndarray, *, tol: float = OUTER_TOL_DEFAULT,
                    ) -> np.ndarray:
    """One step of the shifted (fundamental-mode-exact) weighted scheme."""
    spec = SchemeSpec("theta_fmes", tau=tau, n_steps=1, sigma=sigma,
                      lambda1=lambda1)
    return make_stepper(spec, sys, tol=tol).step(np.asarray(y_n, dtype=float))


def pade_step_fmes(sys: FemSystem, l: int, m: int, tau: float, lambda1: float,
                   y_n: np.ndarray, *, tol: float = OUTER_TOL_DEFAULT,
                   mass_tol: float = MASS_TOL_DEFAULT) -> np.ndarray:
    """One step of the shifted Pade scheme for (l, m) in (0,1), (1,1), (0,2)."""
    spec = SchemeSpec("pade_fmes", tau=tau, n_steps=1, l=l, m=m,
                      lambda1=lambda1)
    return make_stepper(spec, sys, tol=tol, mass_tol=mass_tol).step(
        np.asarray(y_n, dtype=float))


def pade_modal_step(basis: ModalBasis, l: int, m: int, tau: float,
                    lambda1: float, y_n: np.ndarray) -> np.ndarray:
    """One modal step: scale the coefficient of mode k by
    exp(-lambda1 tau) R_lm((lambda_k - lambda1) tau).  Any l + m >= 1."""
    spec = SchemeSpec("pade_modal", tau=tau, n_steps=1, l=l, m=m,
                      lambda1=lambda1)
    return make_stepper(spec, None, basis=basis).step(
        np.asarray(y_n, dtype=float))


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Per-level record of a time-stepping run.

    m_norms holds the mass norm at every level and amplitudes the
    fundamental-mode coefficient (y^n, phi1)_M when phi1 was supplied.
    Full vectors are stored only at the requested levels (all by default).
    """

    spec: SchemeSpec
    times: np.ndarray
    m_norms: np.ndarray
    amplitudes: np.ndarray | None
    vectors: dict[int, np.ndarray] = field(repr=False)

    def vector_at(self, level: int) -> np.ndarray:
        try:
            return self.vectors[level]
        except KeyError:
            raise KeyError(f"vector at level {level} was not stored") from None

    @property
    def final(self) -> np.ndarray:
        return self.vectors[len(self.times) - 1]


def run_scheme(spec: SchemeSpec, sys: FemSystem, w0: np.ndarray, *,
               phi1: np.ndarray | None = None,
               basis: ModalBasis | None = None,
               store_levels=None,
               tol: float = OUTER_TOL_DEFAULT,
               mass_tol: float = MASS_TOL_DEFAULT) -> Trajectory:
    """Iterate the selected stepper n_steps times from y^0 = w0.

    ``store_levels`` limits which full vectors are kept (a collection of
    level indices; levels 0 and n_steps are always kept).  Norms and, when
    phi1 is given, fundamental-mode amplitudes are recorded at every level.

    Raises
    ------
    ConvergenceError
        If a step's solve fails; the message carries the level index.
    """
    mass = sys.M if sys is not None else basis.mass
    y = np.array(w0, dtype=float)
    if y.shape != (mass.shape[0],):
        raise ValueError(f"w0 has shape {y.shape}, expected ({mass.shape[0]},)")
    stepper = make_stepper(spec, sys, basis=basis, tol=tol, mass_tol=mass_tol)

    n_steps = spec.n_steps
    keep = None if store_levels is None else set(store_levels) | {0, n_steps}
    times = np.arange(n_steps + 1) * spec.tau
    m_norms = np.empty(n_steps + 1)
    amplitudes = np.empty(n_steps + 1) if phi1 is not None else None
    vectors: dict[int, np.ndarray] = {}

    def record(level: int, vec: np.ndarray):
        mv = mass @ vec
        m_norms[level] = math.sqrt(vec @ mv)
        if amplitudes is not None:
            amplitudes[level] = float(phi1 @ mv)
        if keep is None or level in keep:
            vectors[level] = vec

    record(0, y)
    for level in range(1, n_steps + 1):
        try:
            y = stepper.step(y)
        except ConvergenceError as err:
            raise ConvergenceError(
                f"{spec.kind} step failed at level {level}: {err}",
                report=err.report) from err
        record(level, y)
    return Trajectory(spec=spec, times=times, m_norms=m_norms,
                      amplitudes=amplitudes, vectors=vectors)
