import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxvolkit.errors import IterationLimit, RankDeficient
from maxvolkit.matrix_core import is_dominant_2vol, log_vol2
from maxvolkit.maxvol import maxvol


def test_single_column_example():
    res = maxvol([[1.0], [2.0], [-3.0]], eps=0)
    assert res.row_indices.tolist() == [2]
    # direct division by the pivot -3
    np.testing.assert_allclose(res.C.ravel(), [-1 / 3, -2 / 3, 1.0], rtol=1e-15)


def test_identity_over_zeros():
    A = np.vstack([np.eye(4), np.zeros((5, 4))])
    res = maxvol(A, eps=0)
    assert sorted(res.row_indices.tolist()) == [0, 1, 2, 3]
    assert np.abs(res.C).max() == 1.0


def test_tied_minors(fixture_3x2):
    res = maxvol(fixture_3x2, eps=0)
    assert res.K == 2
    assert abs(np.linalg.det(fixture_3x2[res.row_indices])) == pytest.approx(1.0)
    assert np.abs(res.C).max() == pytest.approx(1.0)


def test_rank_deficient():
    with pytest.raises(RankDeficient):
        maxvol(np.ones((5, 2)))


def test_iteration_limit_flag_and_strict(rng):
    # start from LU pivots; with max_iters=0 any needed swap is refused
    for _ in range(50):
        A = rng.standard_normal((60, 6))
        if np.abs(maxvol(A, eps=0, max_iters=0).C).max() > 1.0:
            break
    res = maxvol(A, eps=0, max_iters=0)
    assert not res.converged and res.iterations == 0
    with pytest.raises(IterationLimit) as info:
        maxvol(A, eps=0, max_iters=0, strict=True)
    assert info.value.result is not None


def test_callback_sees_every_swap(rng):
    A = rng.standard_normal((80, 5))
    seen = []
    res = maxvol(A, eps=0, callback=lambda rows, C: seen.append(rows.copy()))
    assert len(seen) == res.iterations
    if seen:
        assert seen[-1].tolist() == res.row_indices.tolist()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.05]))
def test_postconditions_random_50x5(seed, eps):
    A = np.random.default_rng(seed).standard_normal((50, 5))
    res = maxvol(A, eps=eps)
    assert res.converged
    assert len(set(res.row_indices.tolist())) == 5
    assert np.abs(res.C).max() <= 1.0 + eps + 1e-12
    np.testing.assert_allclose(res.C[res.row_indices], np.eye(5), atol=0)
    assert np.linalg.norm(res.C @ A[res.row_indices] - A) <= 1e-8 * np.linalg.norm(A)
    # C is A inv(A_hat) at exit
    np.testing.assert_allclose(res.C, A @ np.linalg.inv(A[res.row_indices]), atol=1e-9)
    assert is_dominant_2vol(A, res.row_indices, tol=eps)


def test_volume_monotone_and_tracked(rng):
    A = rng.standard_normal((200, 8))
    trace = []
    res = maxvol(A, eps=0, callback=lambda rows, C: trace.append(log_vol2(A[rows])))
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert np.all(np.diff(res.history) > 0)
    assert res.log_volume == pytest.approx(log_vol2(A[res.row_indices]), abs=1e-9)
