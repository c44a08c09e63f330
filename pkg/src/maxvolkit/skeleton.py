"""
Pseudo-skeleton (CUR) approximation on maximal-volume rows and columns,
and the search for the largest-modulus entry of a low-rank matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .matrix_core import LowRankFactors, as_matrix, pinv, spectral_norm, svd
from .maxvol import maxvol
from .rect_maxvol import rect_maxvol

__all__ = [
    "SkeletonApprox",
    "select_rows",
    "select_skeleton",
    "build_pseudo_skeleton",
    "skeleton_errors",
    "find_max_element",
    "random_lowrank_factors",
    "max_element_trial",
]

METHODS = ("square", "rect")


def select_rows(basis, method="square", tau=1.0, eps=0.05, min_K=None):
    """Row indices of a tall basis chosen by ``maxvol`` or ``rect_maxvol``."""
    if method == "square":
        return maxvol(basis, eps=eps).row_indices
    if method == "rect":
        n = basis.shape[0]
        if min_K is not None:
            min_K = min(max(min_K, basis.shape[1]), n)
            max_K = max(min_K, min(n, 2 * basis.shape[1] + 1))
            return rect_maxvol(basis, tau=tau, min_K=min_K, max_K=max_K, eps=eps).row_indices
        return rect_maxvol(basis, tau=tau, eps=eps).row_indices
    raise ValueError(f"method must be one of {METHODS}, got {method!r}")


@dataclass
class SkeletonApprox:
    """Factors of ``A ~ left_factor @ core @ right_factor``.

    ``left_factor`` holds the selected columns (N-by-m), ``right_factor`` the
    selected rows (n-by-M), and ``core`` the pseudo-inverse (m-by-n) of their
    intersection block.
    """

    row_indices: np.ndarray
    col_indices: np.ndarray
    left_factor: np.ndarray
    core: np.ndarray
    right_factor: np.ndarray

    def to_dense(self):
        return self.left_factor @ (self.core @ self.right_factor)


def _row_space_basis(R, rcond=1e-12):
    # orthonormal basis (M-by-rank) of the row space of R, numerical rank by rcond
    _, s, Vt = np.linalg.svd(R, full_matrices=False)
    rank = int(np.sum(s > rcond * s[0])) if s[0] > 0 else 0
    if rank == 0:
        raise DimensionError("selected rows are all zero")
    return Vt[:rank].T


def select_skeleton(A, r, method="square", tau=1.0, eps=0.05):
    """Choose basis rows and columns for a pseudo-skeleton approximation.

    Rows come from ``maxvol``/``rect_maxvol`` on the left singular vectors of
    the rank-`r` truncated SVD.  Columns are then chosen inside the selected
    rows ``R = A[rows]``: the same selector runs on an orthonormal basis of
    the row space of ``R`` (truncated to its numerical rank).  With
    ``method="rect"`` at least as many columns as rows are returned.

    Returns
    -------
    rows, cols : ndarray of int
    """
    A = as_matrix(A)
    if not 1 <= r <= min(A.shape):
        raise DimensionError(f"rank {r} outside 1..{min(A.shape)}")
    U = svd(A, r).U
    rows = select_rows(U, method, tau, eps)
    basis = _row_space_basis(A[rows])
    if method == "rect":
        cols = select_rows(basis, method, tau, eps, min_K=rows.shape[0])
    else:
        cols = select_rows(basis, method, tau, eps)
    return rows, cols


def build_pseudo_skeleton(A, row_indices, col_indices, rcond=1e-12):
    """Pseudo-skeleton approximation on the given rows and columns.

    ``A_approx = A[:, cols] @ pinv(A[rows][:, cols]) @ A[rows]``, with the
    pseudo-inverse cut off at ``rcond`` relative to the largest singular
    value of the intersection block.
    """
    A = as_matrix(A)
    rows = np.asarray(row_indices, dtype=np.intp)
    cols = np.asarray(col_indices, dtype=np.intp)
    for name, idx, bound in (("row", rows, A.shape[0]), ("column", cols, A.shape[1])):
        if idx.ndim != 1 or idx.size == 0:
            raise DimensionError(f"{name} indices must be a non-empty 1-D list")
        if np.unique(idx).size != idx.size or idx.min() < 0 or idx.max() >= bound:
            raise DimensionError(f"{name} indices must be distinct and within 0..{bound - 1}")
    right = A[rows].copy()
    left = A[:, cols].copy()
    core = pinv(right[:, cols], rcond=rcond)
    return SkeletonApprox(rows, cols, left, core, right)


def skeleton_errors(A, approx):
    """Absolute and relative Frobenius and spectral errors of an approximation."""
    A = as_matrix(A)
    E = A - approx.to_dense()
    fro_a = float(np.linalg.norm(A))
    spec_a = spectral_norm(A)
    fro = float(np.linalg.norm(E))
    spec = spectral_norm(E) if fro > 0 else 0.0
    return {
        "frobenius": fro,
        "spectral": spec,
        "relative_frobenius": fro / fro_a if fro_a > 0 else fro,
        "relative_spectral": spec / spec_a if spec_a > 0 else spec,
    }


def find_max_element(factors, method="square", tau=1.0, eps=0.05):
    """Estimate the largest-modulus entry of ``U diag(sigma) V^T``.

    Rows are chosen on ``U`` and columns on ``V`` by the same selector; only
    the intersection block is formed.  Returns ``(i, j, value)`` for the
    largest-modulus entry of that block, with global indices and the signed
    value.  Ties go to the smallest row-major position inside the block.
    """
    if not isinstance(factors, LowRankFactors):
        factors = LowRankFactors(*factors)
    rows = select_rows(as_matrix(factors.U, "U"), method, tau, eps)
    cols = select_rows(as_matrix(factors.V, "V"), method, tau, eps)
    block = (factors.U[rows] * factors.sigma) @ factors.V[cols].T
    flat = int(np.argmax(np.abs(block)))
    bi, bj = divmod(flat, block.shape[1])
    return int(rows[bi]), int(cols[bj]), float(block[bi, bj])


def random_lowrank_factors(n, m, rank, rng):
    """Random low-rank test matrix in factored form.

    ``U`` and ``V`` are Q factors of n-by-rank and m-by-rank matrices with
    entries uniform on [0, 1]; the singular values are uniform on [0, 1].
    They are sorted decreasingly (with the matching columns of ``U`` and
    ``V``), which leaves the product unchanged.
    """
    U = np.linalg.qr(rng.random((n, rank)))[0]
    V = np.linalg.qr(rng.random((m, rank)))[0]
    d = rng.random(rank)
    order = np.argsort(-d, kind="stable")
    return LowRankFactors(
        np.ascontiguousarray(U[:, order]), d[order], np.ascontiguousarray(V[:, order])
    )


def max_element_trial(n, m, rank, seed, methods=METHODS, tau=1.0, eps=0.05):
    """One max-element experiment: ratio of found to true largest modulus per method."""
    rng = np.random.default_rng(seed)
    factors = random_lowrank_factors(n, m, rank, rng)
    # full-scan oracle; the found entry is read back from the same dense
    # matrix so the ratio cannot exceed 1 through summation-order rounding
    full = np.abs((factors.U * factors.sigma) @ factors.V.T)
    true_max = float(full.max())
    out = {}
    for method in methods:
        i, j, _ = find_max_element(factors, method, tau, eps)
        out[method] = float(full[i, j]) / true_max
    return out
