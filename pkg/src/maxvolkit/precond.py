"""
Preconditioning overdetermined least squares with maximal-volume rows.

The rows of ``A`` are split into a basic block ``A_hat = A[basic_rows]`` and
the rest ``B``.  With ``C~ = B @ pinv(A_hat)`` the augmented matrix::

    Z = [[I_(N-K),  C~   ],
         [C~.T,    -I_K  ]]

has condition number ``sqrt(1 + ||C~||_2^2)``, so a selection that keeps the
coefficients small gives a well-conditioned system.
"""

import time
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .matrix_core import as_matrix, least_squares_min_norm, spectral_norm
from .maxvol import HAT_IDENTITY, maxvol
from .rect_maxvol import rect_maxvol

__all__ = [
    "AugmentedSystem",
    "build_augmented",
    "cond_formula",
    "cond_direct",
    "solve_via_augmented",
    "compare_methods",
]


@dataclass
class AugmentedSystem:
    """Basic/non-basic row split of ``A`` and the coefficients of the non-basic rows.

    ``permutation`` lists basic rows first, then non-basic rows in increasing
    order, so ``A[permutation] == vstack([A_hat, B])``.
    """

    basic_rows: np.ndarray
    tilde_C: np.ndarray
    permutation: np.ndarray
    hat_C_mode: str = HAT_IDENTITY

    @property
    def K(self):
        return int(self.basic_rows.shape[0])

    @property
    def nonbasic_rows(self):
        return self.permutation[self.K:]

    def assemble(self):
        """Dense augmented matrix ``Z`` of order N."""
        m, k = self.tilde_C.shape
        Z = np.zeros((m + k, m + k))
        Z[:m, :m] = np.eye(m)
        Z[:m, m:] = self.tilde_C
        Z[m:, :m] = self.tilde_C.T
        Z[m:, m:] = -np.eye(k)
        return Z

    def full_C(self):
        """Coefficient matrix with identity basic block, rows in the original order."""
        n = self.permutation.shape[0]
        C = np.zeros((n, self.K))
        C[self.basic_rows] = np.eye(self.K)
        C[self.nonbasic_rows] = self.tilde_C
        return C


def _select(basis, method, tau, eps):
    if method == "square":
        return maxvol(basis, eps=eps)
    if method == "rect":
        return rect_maxvol(basis, tau=tau, eps=eps)
    raise ValueError(f"method must be 'square' or 'rect', got {method!r}")


def build_augmented(A, method="rect", tau=1.0, eps=0.05):
    """Split the rows of `A` with ``maxvol``/``rect_maxvol`` and form ``C~``.

    Selection runs on the orthonormal Q factor of `A`; the coefficients
    ``A @ pinv(A_hat)`` are invariant under that change of column basis, and
    working with Q avoids the conditioning of `A` itself.
    """
    A = as_matrix(A)
    n, r = A.shape
    if n < r:
        raise DimensionError(f"need N >= r, got shape {A.shape}")
    Q = np.linalg.qr(A)[0]
    sel = _select(Q, method, tau, eps)
    basic = sel.row_indices.copy()
    mask = np.ones(n, dtype=bool)
    mask[basic] = False
    nonbasic = np.flatnonzero(mask)
    tilde_C = np.ascontiguousarray(sel.C[nonbasic])
    return AugmentedSystem(basic, tilde_C, np.concatenate([basic, nonbasic]))


def cond_formula(sys):
    """``sqrt(1 + ||C~||_2^2)``, the 2-norm condition number of ``Z``.

    Exact whenever ``Z`` has an eigenvalue of modulus 1, i.e. when ``C~`` is
    not square of full rank; this covers every ``K < N / 2`` and every
    ``K > r`` selection.
    """
    C = sys.tilde_C if isinstance(sys, AugmentedSystem) else np.asarray(sys, dtype=float)
    if C.size == 0:
        return 1.0
    return float(np.sqrt(1.0 + spectral_norm(C) ** 2))


def cond_direct(sys):
    """Condition number of the assembled ``Z`` from its full singular spectrum."""
    s = np.linalg.svd(sys.assemble(), compute_uv=False)
    return float(s[0] / s[-1])


def solve_via_augmented(A, b, method="rect", tau=1.0, eps=0.05, system=None):
    """Least-squares solution of ``A x ~ b`` through the augmented system.

    Solves ``Z [r_B; y] = [b_B; -P b_hat]`` where ``P = A_hat pinv(A_hat)`` and
    ``b_hat``, ``b_B`` are the basic and non-basic parts of `b`.  With the
    projector on the right-hand side, ``y`` lies in the range of ``A_hat``,
    so ``A_hat x = y`` is consistent and its least-squares solve recovers
    ``x`` exactly.

    Returns
    -------
    x : ndarray, shape (r,)
    residual_norm : float
        ``||A x - b||_2``.
    cond_Z : float
        From :func:`cond_formula`.
    """
    A = as_matrix(A)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if b.shape[0] != A.shape[0]:
        raise DimensionError(f"b has length {b.shape[0]}, A has {A.shape[0]} rows")
    if system is None:
        system = build_augmented(A, method, tau, eps)
    A_hat = A[system.basic_rows]
    b_hat = b[system.basic_rows]
    b_B = b[system.nonbasic_rows]
    Q_hat = np.linalg.qr(A_hat)[0]
    proj_b = Q_hat @ (Q_hat.T @ b_hat)
    rhs = np.concatenate([b_B, -proj_b])
    sol = np.linalg.solve(system.assemble(), rhs)
    y = sol[b_B.shape[0]:]
    x = least_squares_min_norm(A_hat, y)
    residual = float(np.linalg.norm(A @ x - b))
    return x, residual, cond_formula(system)


def compare_methods(A, tau=1.0, eps=0.05, methods=("square", "rect")):
    """Run each selection method on `A` and report K, ``||C||_2`` and wall time.

    ``||C||_2`` is the spectral norm of the full coefficient matrix with
    identity basic block, equal to ``sqrt(1 + ||C~||_2^2)``.
    """
    A = as_matrix(A)
    report = {}
    for method in methods:
        t0 = time.perf_counter()
        sys = build_augmented(A, method, tau, eps)
        elapsed = time.perf_counter() - t0
        report[method] = {
            "K": sys.K,
            "C_norm": spectral_norm(sys.full_C()),
            "cond_Z": cond_formula(sys),
            "time": elapsed,
        }
    return report
