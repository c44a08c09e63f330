import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxvolkit.errors import InvalidBounds, RankDeficient
from maxvolkit.matrix_core import brute_force_best_rows, least_squares_min_norm, log_vol2
from maxvolkit.rect_maxvol import default_max_k, rect_maxvol


def test_square_stage_already_below_tau(fixture_3x2):
    res = rect_maxvol(fixture_3x2, tau=1.5, min_K=2, max_K=3)
    assert res.K == 2
    outside = np.setdiff1d(np.arange(3), res.row_indices)[0]
    assert np.linalg.norm(res.C[outside]) == pytest.approx(math.sqrt(2))


def test_grows_to_all_rows(fixture_3x2):
    res = rect_maxvol(fixture_3x2, tau=1.0, max_K=3, identity_hat=False)
    assert res.K == 3
    assert res.hat_C_mode == "projector"
    # A (A^T A)^-1 A^T = [[2,-1,1],[-1,2,1],[1,1,2]] / 3, row norm sqrt(6)/3
    expected_rows = np.array([[2, -1, 1], [-1, 2, 1], [1, 1, 2]]) / 3.0
    P = res.C[np.argsort(res.row_indices)][:, np.argsort(res.row_indices)]
    np.testing.assert_allclose(P, expected_rows, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(res.C, axis=1), math.sqrt(6) / 3, rtol=1e-12)


def test_identity_over_zeros_stops_immediately():
    r = 3
    A = np.vstack([np.eye(r), np.zeros((6, r))])
    res = rect_maxvol(A, tau=1.0, min_K=r)
    assert res.K == r
    np.testing.assert_array_equal(res.C[np.setdiff1d(np.arange(9), res.row_indices)], 0.0)


def test_identity_hat_rows(rng):
    A = rng.standard_normal((60, 4))
    res = rect_maxvol(A, tau=0.9)
    np.testing.assert_array_equal(res.C[res.row_indices], np.eye(res.K))
    assert np.linalg.norm(res.C @ A[res.row_indices] - A) <= 1e-8 * np.linalg.norm(A)


def test_bounds_validation(rng):
    A = rng.standard_normal((10, 3))
    with pytest.raises(InvalidBounds):
        rect_maxvol(A, min_K=2)
    with pytest.raises(InvalidBounds):
        rect_maxvol(A, min_K=5, max_K=4)
    with pytest.raises(InvalidBounds):
        rect_maxvol(A, max_K=11)
    with pytest.raises(RankDeficient):
        rect_maxvol(np.ones((10, 3)))


def test_min_and_max_k_respected(rng):
    A = rng.standard_normal((100, 5))
    assert rect_maxvol(A, tau=100.0, min_K=9).K == 9
    assert rect_maxvol(A, tau=0.01, max_K=7).K == 7
    assert default_max_k(100, 5) == 11
    assert default_max_k(8, 5) == 8


def test_exit_norm_bound(rng):
    A = rng.standard_normal((300, 6))
    for tau in (1.0, 1.5, 2.0):
        res = rect_maxvol(A, tau=tau, max_K=300)
        assert res.K < 300
        assert np.linalg.norm(res.C, axis=1).max() <= tau + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_update_matches_recompute(seed):
    A = np.random.default_rng(seed).standard_normal((60, 5))
    checks = []

    def cb(rows, C, L):
        fresh = least_squares_min_norm(A[rows].T, A.T).T
        checks.append(np.linalg.norm(C - fresh) / np.linalg.norm(fresh))
        checks.append(np.abs(L - np.einsum("ij,ij->i", C, C)).max())

    rect_maxvol(A, tau=1.0, min_K=8, max_K=12, callback=cb)
    assert checks and max(checks) <= 1e-9


def test_volume_growth_per_step(rng):
    A = rng.standard_normal((80, 5))
    prev = {}

    def cb(rows, C, L):
        if prev:
            i = rows[-1]
            sq_growth = math.exp(2 * (log_vol2(A[rows]) - prev["logv"]))
            assert sq_growth == pytest.approx(1 + prev["L"][i], rel=1e-9)
            assert prev["L"][i] == pytest.approx(
                np.max(np.where(prev["mask"], -np.inf, prev["L"])), rel=0, abs=0)
        mask = np.zeros(80, dtype=bool)
        mask[rows] = True
        prev.update(logv=log_vol2(A[rows]), L=L.copy(), mask=mask)

    res = rect_maxvol(A, tau=0.5, max_K=15, callback=cb)
    assert res.K == 15
    assert res.log_volume == pytest.approx(log_vol2(A[res.row_indices]), abs=1e-9)


def test_k_strictly_increases(rng):
    A = rng.standard_normal((50, 4))
    ks = []
    rect_maxvol(A, tau=0.3, max_K=20, callback=lambda rows, C, L: ks.append(len(rows)))
    assert ks == list(range(5, 21))


def _spectral_case(A, K, identity_hat):
    res = rect_maxvol(A, min_K=K, max_K=K, identity_hat=identity_hat)
    rows = res.row_indices
    mask = np.ones(A.shape[0], dtype=bool)
    mask[rows] = False
    BA = A[mask] @ np.linalg.pinv(A[rows])
    return np.linalg.svd(res.C, compute_uv=False), np.linalg.svd(BA, compute_uv=False)


@pytest.mark.parametrize("identity_hat, tail", [(True, 1.0), (False, 0.0)])
def test_spectral_structure(rng, identity_hat, tail):
    r, K = 6, 10
    for _ in range(5):
        A = rng.standard_normal((40, r))
        sC, sB = _spectral_case(A, K, identity_hat)
        np.testing.assert_allclose(sC[:r], np.sqrt(1 + sB[:r] ** 2), atol=1e-8)
        np.testing.assert_allclose(sC[r:K], tail, atol=1e-8)


def test_theorem_bound_against_dominant(rng):
    for N, r, K in ((8, 2, 3), (9, 2, 4), (10, 3, 5)):
        for _ in range(10):
            A = rng.standard_normal((N, r))
            rows = brute_force_best_rows(A, K)
            C = least_squares_min_norm(A[rows].T, A.T).T
            rest = np.setdiff1d(np.arange(N), rows)
            bound = math.sqrt(r / (K + 1 - r))
            assert np.linalg.norm(C[rest], axis=1).max() <= bound + 1e-12
