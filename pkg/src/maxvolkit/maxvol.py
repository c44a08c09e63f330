"""Square maximal-volume row selection by greedy row swaps."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, IterationLimit
from .matrix_core import as_matrix, lu_top_rows

__all__ = ["SelectionResult", "maxvol"]

HAT_IDENTITY = "identity"
HAT_PROJECTOR = "projector"


@dataclass
class SelectionResult:
    """Selected rows and the coefficients expressing every row through them.

    Attributes
    ----------
    row_indices : ndarray of int, shape (K,)
        Selected rows of ``A``, in selection order.
    C : ndarray, shape (N, K)
        Coefficients with ``A == C @ A[row_indices]``.
    hat_C_mode : {"identity", "projector"}
        Whether ``C[row_indices]`` is the identity or the orthoprojector
        ``A_hat @ pinv(A_hat)``.
    iterations : int
        Row swaps (square stage) plus row additions (rectangular stage).
    converged : bool
        False if an iteration cap stopped the search early.
    log_volume : float
        Natural log of the 2-volume of ``A[row_indices]``, tracked
        incrementally.
    """

    row_indices: np.ndarray
    C: np.ndarray
    hat_C_mode: str = HAT_IDENTITY
    iterations: int = 0
    converged: bool = True
    log_volume: float = float("nan")
    history: list = field(default_factory=list, repr=False)

    @property
    def K(self):
        return int(self.row_indices.shape[0])

    def submatrix(self, A):
        return np.asarray(A)[self.row_indices]


def _initial_coefficients(A, rows):
    # C = A @ inv(A[rows]) via one LU solve of the transposed system
    return np.ascontiguousarray(np.linalg.solve(A[rows].T, A.T).T)


def maxvol(A, eps=0.05, max_iters=None, *, strict=False, callback=None):
    """Find an r-by-r submatrix of locally maximal volume in a tall matrix.

    Starts from the pivot rows of partial-pivoting LU and repeatedly swaps
    in the row ``i`` for the selected position ``j`` where ``|C[i, j]|`` is
    largest, as long as it exceeds ``1 + eps``.  Each swap multiplies
    ``|det(A_hat)|`` by ``|C[i, j]|``, so the volume strictly increases.

    Parameters
    ----------
    A : array_like, shape (N, r)
        Full column rank, ``N >= r``.
    eps : float, optional
        Quasi-dominance slack; on exit ``max|C| <= 1 + eps``.  Defaults to
        0.05.
    max_iters : int, optional
        Swap cap, ``10 * r`` by default.
    strict : bool, optional
        Raise :class:`IterationLimit` instead of returning an unconverged
        result.
    callback : callable, optional
        Called as ``callback(row_indices, C)`` after each swap.  Arrays are
        live buffers; copy them if you keep them.

    Returns
    -------
    SelectionResult
        With ``K == r`` and unit rows of ``C`` at the selected indices.

    Raises
    ------
    RankDeficient
        If `A` is numerically rank deficient.
    IterationLimit
        Only with ``strict=True``.

    Examples
    --------
    >>> res = maxvol([[1.0], [2.0], [-3.0]], eps=0)
    >>> res.row_indices.tolist(), res.C.ravel().round(4).tolist()
    ([2], [-0.3333, -0.6667, 1.0])
    """
    A = as_matrix(A)
    n, r = A.shape
    if n < r:
        raise DimensionError(f"need N >= r, got shape {A.shape}")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if max_iters is None:
        max_iters = 10 * r

    rows = lu_top_rows(A)
    C = _initial_coefficients(A, rows)
    C[rows] = np.eye(r)
    log_volume = float(np.linalg.slogdet(A[rows])[1])
    history = [log_volume]
    threshold = 1.0 + eps

    iters = 0
    converged = True
    while True:
        flat = int(np.argmax(np.abs(C)))
        i, j = divmod(flat, r)
        pivot = C[i, j]
        if abs(pivot) <= threshold:
            break
        if iters >= max_iters:
            converged = False
            break
        # Sherman-Morrison swap: position j now holds row i
        w = C[i].copy()
        w[j] -= 1.0
        C -= np.outer(C[:, j] / pivot, w)
        rows[j] = i
        C[i] = 0.0
        C[i, j] = 1.0
        log_volume += float(np.log(abs(pivot)))
        history.append(log_volume)
        iters += 1
        if callback is not None:
            callback(rows, C)

    result = SelectionResult(
        row_indices=rows.copy(),
        C=C,
        hat_C_mode=HAT_IDENTITY,
        iterations=iters,
        converged=converged,
        log_volume=log_volume,
        history=history,
    )
    if not converged and strict:
        raise IterationLimit(
            f"maxvol did not reach max|C| <= {threshold} within {max_iters} swaps", result
        )
    return result
