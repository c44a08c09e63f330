"""
Dense matrix kernels used by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype float64 in C (row-major)
order, so a row slice ``A[i]`` is a view and costs O(1).  :func:`as_matrix`
validates and normalises any array-like input into that form.

The brute-force helpers (:func:`lemma1_sides`, :func:`is_dominant_2vol`,
:func:`brute_force_best_rows`) are exhaustive oracles meant for small
instances in tests.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import CombinatorialLimit, DimensionError, RankDeficient

__all__ = [
    "LowRankFactors",
    "as_matrix",
    "vol2",
    "log_vol2",
    "lu_top_rows",
    "least_squares_min_norm",
    "pinv",
    "svd",
    "spectral_norm",
    "lemma1_sides",
    "is_dominant_2vol",
    "brute_force_best_rows",
]

# Relative pseudo-inverse cutoff: singular values below RCOND * sigma_max are dropped.
RCOND = 1e-12
PIVOT_TOL = 1e-12
# Rounding allowance used when comparing volumes that are equal in exact arithmetic.
VOLUME_SLACK = 1e-13
BRUTE_FORCE_LIMIT = 10**6


def as_matrix(a, name="A"):
    """Return `a` as a finite, C-contiguous float64 2-D array.

    1-D input is not promoted; pass ``a.reshape(-1, 1)`` explicitly for a
    column.
    """
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


@dataclass(frozen=True)
class LowRankFactors:
    """Truncated SVD ``A ~ U @ diag(sigma) @ V.T``.

    ``U`` is N-by-k and ``V`` is M-by-k, both with orthonormal columns;
    ``sigma`` is non-increasing and non-negative.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        k = self.sigma.shape[0]
        if self.U.shape[1] != k or self.V.shape[1] != k:
            raise DimensionError(
                f"factor shapes disagree: U {self.U.shape}, sigma ({k},), V {self.V.shape}"
            )

    @property
    def rank(self):
        return self.sigma.shape[0]

    def to_dense(self):
        return (self.U * self.sigma) @ self.V.T


def _check_tall(A):
    if A.shape[0] < A.shape[1]:
        raise DimensionError(f"need n_rows >= n_cols, got shape {A.shape}")


def vol2(A):
    """2-volume ``sqrt(det(A.T @ A))`` of a tall matrix.

    Evaluated as the product of singular values, so the condition number is
    never squared.  Rank-deficient input gives 0 or a value near 0.
    """
    A = as_matrix(A)
    _check_tall(A)
    return float(np.prod(np.linalg.svd(A, compute_uv=False)))


def log_vol2(A):
    """Natural log of :func:`vol2`; ``-inf`` when a singular value is exactly zero.

    Use this instead of :func:`vol2` when the column count is large enough for
    the product of singular values to over- or underflow.
    """
    A = as_matrix(A)
    _check_tall(A)
    s = np.linalg.svd(A, compute_uv=False)
    if np.any(s == 0.0):
        return float("-inf")
    return float(np.sum(np.log(s)))


def lu_top_rows(A, pivot_tol=PIVOT_TOL):
    """Pivot rows of Gaussian elimination with partial (row) pivoting.

    Parameters
    ----------
    A : array_like, shape (N, r)
        Tall matrix, ``N >= r``.
    pivot_tol : float
        Step ``k`` fails when its best pivot is below
        ``pivot_tol * max|A[:, k]|`` (the column's initial magnitude).

    Returns
    -------
    rows : ndarray of int, shape (r,)
        Pivot rows in elimination order; ``A[rows]`` is nonsingular.

    Raises
    ------
    RankDeficient
        If some elimination step finds no acceptable pivot.
    """
    A = as_matrix(A)
    _check_tall(A)
    n, r = A.shape
    work = A.copy()
    scale = np.abs(A).max(axis=0)
    available = np.ones(n, dtype=bool)
    rows = np.empty(r, dtype=np.intp)
    for k in range(r):
        col = np.where(available, np.abs(work[:, k]), -1.0)
        p = int(np.argmax(col))  # first maximum, so ties go to the smallest index
        pivot = col[p]
        if pivot <= 0.0 or pivot < pivot_tol * scale[k]:
            raise RankDeficient(
                f"no acceptable pivot in column {k}: |pivot| = {pivot:.3e}, "
                f"column scale = {scale[k]:.3e}"
            )
        rows[k] = p
        available[p] = False
        if k + 1 < r:
            factors = work[available, k] / work[p, k]
            work[available, k + 1:] -= np.outer(factors, work[p, k + 1:])
    return rows


def least_squares_min_norm(A, B, rcond=RCOND):
    """Minimum-Frobenius-norm minimiser ``X = pinv(A) @ B`` of ``||A X - B||_F``.

    Singular values below ``rcond * sigma_max`` are treated as zero, so
    rank-deficient `A` is handled without error.  A 1-D `B` gives a 1-D result.
    """
    A = as_matrix(A)
    B = np.asarray(B, dtype=np.float64)
    if B.shape[0] != A.shape[0]:
        raise DimensionError(f"row mismatch: A {A.shape}, B {B.shape}")
    X, *_ = np.linalg.lstsq(A, B, rcond=rcond)
    return X


def pinv(A, rcond=RCOND):
    """Moore-Penrose pseudo-inverse with the library-wide relative cutoff."""
    A = as_matrix(A)
    return np.linalg.pinv(A, rcond=rcond)


def svd(A, k=None):
    """Thin SVD of `A`, optionally truncated to the leading `k` triplets.

    Returns
    -------
    LowRankFactors
        ``U`` (N-by-k), ``sigma`` (k,), ``V`` (M-by-k).
    """
    A = as_matrix(A)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if k is not None:
        if not 1 <= k <= s.shape[0]:
            raise DimensionError(f"truncation rank {k} outside 1..{s.shape[0]}")
        U, s, Vt = U[:, :k], s[:k], Vt[:k]
    return LowRankFactors(np.ascontiguousarray(U), s.copy(), np.ascontiguousarray(Vt.T))


def spectral_norm(A):
    """Largest singular value of `A`."""
    A = as_matrix(A)
    return float(np.linalg.svd(A, compute_uv=False)[0])


def lemma1_sides(A, B):
    """Both sides of the leave-one-out determinant identity.

    For ``A`` of shape (N, M) and ``B`` of shape (M, N) with ``M > N``::

        det(A B) == sum_i det(A_{-i} B_{-i}) / (M - N)

    where ``A_{-i}`` drops column ``i`` of ``A`` and ``B_{-i}`` drops row ``i``
    of ``B``.  Returns ``(lhs, rhs)``; test oracle only.
    """
    A = as_matrix(A)
    B = as_matrix(B, "B")
    n, m = A.shape
    if B.shape != (m, n):
        raise DimensionError(f"B must have shape {(m, n)}, got {B.shape}")
    if m <= n:
        raise DimensionError(f"need M > N, got N={n}, M={m}")
    lhs = float(np.linalg.det(A @ B))
    keep = np.ones(m, dtype=bool)
    total = 0.0
    for i in range(m):
        keep[i] = False
        total += np.linalg.det(A[:, keep] @ B[keep])
        keep[i] = True
    return lhs, float(total / (m - n))


def _subset_log_vols(A, subsets):
    # subsets: (S, K) integer array; batched singular values of every A[subset]
    s = np.linalg.svd(A[subsets], compute_uv=False)
    with np.errstate(divide="ignore"):
        return np.log(s).sum(axis=1)


def is_dominant_2vol(A, rows, tol=0.0):
    """Check 2-volume dominance of ``A[rows]`` by trying every single-row swap.

    True iff no swap of a selected row for an unselected row raises the
    2-volume above ``(1 + tol)`` times the current one.  Volume comparisons
    carry a ``VOLUME_SLACK`` relative allowance for rounding.  Cost is
    O(K (N - K)) SVDs; intended for small matrices.
    """
    A = as_matrix(A)
    rows = np.asarray(rows, dtype=np.intp)
    n = A.shape[0]
    k = rows.shape[0]
    if k > n or len(set(rows.tolist())) != k:
        raise DimensionError("rows must be distinct indices into A")
    if k < A.shape[1]:
        raise DimensionError(f"need at least {A.shape[1]} rows, got {k}")
    base = _subset_log_vols(A, rows[None, :])[0]
    outside = np.setdiff1d(np.arange(n), rows)
    if outside.size == 0:
        return True
    swaps = np.repeat(rows[None, :], k * outside.size, axis=0)
    pos = np.repeat(np.arange(k), outside.size)
    swaps[np.arange(swaps.shape[0]), pos] = np.tile(outside, k)
    swapped = _subset_log_vols(A, swaps)
    limit = base + np.log1p(tol) + VOLUME_SLACK
    return bool(np.all(swapped <= limit))


def brute_force_best_rows(A, K, limit=BRUTE_FORCE_LIMIT):
    """Exhaustive search for the K-row submatrix of largest 2-volume.

    Subsets are visited in lexicographic order and a later subset replaces
    the incumbent only if its log-volume is larger by more than 1e-12, so
    ties resolve to the lexicographically smallest set.

    Raises
    ------
    CombinatorialLimit
        If ``binomial(N, K)`` exceeds `limit`.
    """
    A = as_matrix(A)
    n, r = A.shape
    if not r <= K <= n:
        raise DimensionError(f"need r <= K <= N, got r={r}, K={K}, N={n}")
    total = comb(n, K)
    if total > limit:
        raise CombinatorialLimit(f"binomial({n}, {K}) = {total} exceeds {limit}")
    best, best_val = None, -np.inf
    it = combinations(range(n), K)
    chunk = 4096
    while True:
        block = np.array([c for _, c in zip(range(chunk), it)], dtype=np.intp)
        if block.size == 0:
            break
        vals = _subset_log_vols(A, block)
        for idx in range(block.shape[0]):
            if best is None or vals[idx] > best_val + 1e-12:
                best_val = vals[idx]
                best = block[idx]
    return [int(i) for i in best]
