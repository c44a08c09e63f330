"""Rectangular 2-volume maximization by greedy row addition."""

from math import ceil

import numpy as np

from .errors import InvalidBounds
from .matrix_core import as_matrix
from .maxvol import HAT_IDENTITY, HAT_PROJECTOR, SelectionResult, maxvol

__all__ = ["rect_maxvol", "default_max_k"]


def default_max_k(n, r):
    """Safety cap on the number of selected rows: ``min(N, ceil(2 r) + 1)``."""
    return min(n, ceil(2 * r) + 1)


def rect_maxvol(
    A,
    tau=1.0,
    min_K=None,
    max_K=None,
    identity_hat=True,
    eps=0.05,
    *,
    maxvol_iters=None,
    callback=None,
):
    """Select K >= r rows of a tall matrix with large 2-volume.

    Starts from a square :func:`~maxvolkit.maxvol.maxvol` submatrix and then
    appends, one at a time, the unselected row whose minimum-norm
    coefficient row is longest.  Adding row ``i`` multiplies the squared
    2-volume by ``1 + ||C_i||^2``.  The coefficients ``C = A @ pinv(A_hat)``
    are refreshed in O(N K) per step with the Sherman-Morrison-Woodbury
    formula::

        C <- [C - C c^T c / (1 + c c^T),  C c^T / (1 + c c^T)],   c = C[i]

    and the squared row lengths with
    ``L_j <- L_j - (C_j c^T)^2 / (1 + c c^T)``.

    Parameters
    ----------
    A : array_like, shape (N, r)
        Full column rank.
    tau : float, optional
        Stop once every unselected row of ``C`` has Euclidean norm
        ``<= tau``.  Defaults to 1.
    min_K, max_K : int, optional
        Bounds on the number of selected rows.  ``min_K`` defaults to ``r``
        and ``max_K`` to :func:`default_max_k`.
    identity_hat : bool, optional
        If True (default) the rows of ``C`` at the selected indices are set
        to unit rows on exit; otherwise they keep the minimum-norm
        (orthoprojector) values.
    eps : float, optional
        Slack passed to the initial square ``maxvol``.
    maxvol_iters : int, optional
        Swap cap for the initial ``maxvol``.
    callback : callable, optional
        ``callback(row_indices, C, L)`` after every added row, with ``C``
        the current N-by-K minimum-norm coefficients and ``L`` the
        maintained squared row norms.  Arguments are live buffers.

    Returns
    -------
    SelectionResult

    Raises
    ------
    RankDeficient
        From the square initialisation.
    InvalidBounds
        If ``r <= min_K <= max_K <= N`` does not hold.
    """
    A = as_matrix(A)
    n, r = A.shape
    if tau <= 0:
        raise ValueError("tau must be positive")
    if min_K is None:
        min_K = r
    if max_K is None:
        max_K = max(default_max_k(n, r), min_K)
    if not r <= min_K <= max_K <= n:
        raise InvalidBounds(f"need r <= min_K <= max_K <= N, got r={r}, "
                            f"min_K={min_K}, max_K={max_K}, N={n}")

    start = maxvol(A, eps=eps, max_iters=maxvol_iters)
    buf = np.zeros((n, max_K))
    buf[:, :r] = start.C
    index = np.empty(max_K, dtype=np.intp)
    index[:r] = start.row_indices
    selected = np.zeros(n, dtype=bool)
    selected[start.row_indices] = True

    L = np.einsum("ij,ij->i", start.C, start.C)
    log_volume = start.log_volume
    history = list(start.history)
    tau2 = tau * tau
    K = r
    while K < max_K:
        masked = np.where(selected, -np.inf, L)
        i = int(np.argmax(masked))
        if masked[i] <= tau2 and K >= min_K:
            break
        C = buf[:, :K]
        c = C[i].copy()
        v = C @ c
        scale = 1.0 / (1.0 + v[i])
        C -= scale * np.outer(v, c)
        buf[:, K] = scale * v
        L -= scale * v * v
        log_volume += 0.5 * float(np.log1p(masked[i]))
        history.append(log_volume)
        index[K] = i
        selected[i] = True
        K += 1
        if callback is not None:
            callback(index[:K], buf[:, :K], L)

    C = buf[:, :K].copy()
    rows = index[:K].copy()
    if identity_hat:
        C[rows] = np.eye(K)
    return SelectionResult(
        row_indices=rows,
        C=C,
        hat_C_mode=HAT_IDENTITY if identity_hat else HAT_PROJECTOR,
        iterations=start.iterations + (K - r),
        converged=start.converged,
        log_volume=log_volume,
        history=history,
    )
