from fractions import Fraction

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20161017)


@pytest.fixture
def fixture_3x2():
    return np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


def exact_det(M):
    """Determinant by fraction-exact Gaussian elimination (independent of LAPACK)."""
    M = [[Fraction(x) for x in row] for row in M]
    n = len(M)
    d = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            d = -d
        d *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return d


def gram_det(A):
    """det(A^T A) via normal equations, the route vol2 deliberately avoids."""
    A = np.asarray(A, dtype=float)
    return float(np.linalg.det(A.T @ A))


def random_rank(rng, n, m, r):
    return rng.standard_normal((n, r)) @ rng.standard_normal((r, m))


def preference_ratings(seed, n_users=300, n_items=100, r=5):
    """Rank-`r` affinity ratings where users mostly rate what they like."""
    from maxvolkit.recsys import RatingsDataset

    g = np.random.default_rng(seed)
    P = g.gamma(0.5, size=(n_users, r)) @ g.gamma(0.5, size=(r, n_items))
    P /= P.max(axis=1, keepdims=True)
    observed = g.random(P.shape) < 0.5 * P
    R = np.clip(np.rint(1 + 4 * P + g.normal(0, 0.5, P.shape)), 1, 5)
    u, i = np.nonzero(observed)
    return RatingsDataset.from_triples(
        (int(a), int(b), R[a, b]) for a, b in zip(u, i))


def six_by_five():
    """Users 0-2 rated item 0; users 3-5 did not."""
    from maxvolkit.recsys import RatingsDataset

    triples = [
        (0, 0, 5), (0, 1, 3),
        (1, 0, 4), (1, 2, 2),
        (2, 0, 1), (2, 3, 5), (2, 4, 4),
        (3, 1, 5), (3, 2, 4),
        (4, 3, 3), (4, 4, 2),
        (5, 1, 1), (5, 4, 5),
    ]
    return RatingsDataset.from_triples(triples)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        ok, title, detail = mod.RESULTS[number]
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {title} ({detail})")
