"""
Representative users and items for collaborative filtering.

A ratings file is loaded into a :class:`RatingsDataset`, densified with
missing ratings as zeros, and factorised by a truncated SVD.  Maximal-volume
rows of the user factor (or item factor) are the representative users (or
items).  Coverage, diversity and precision-at-n score a representative set.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, EmptyDataset, ParseError, RankDeficient
from .matrix_core import RCOND, svd
from .maxvol import maxvol
from .rect_maxvol import rect_maxvol

__all__ = [
    "RatingsDataset",
    "PrecisionResult",
    "load_ratings",
    "parse_ratings",
    "representatives",
    "coverage",
    "diversity",
    "precision_at_n",
    "train_test_split",
]

log = logging.getLogger(__name__)

SIDES = ("users", "items")


@dataclass
class RatingsDataset:
    """(user, item, rating) triples with dense 0-based indices.

    ``user_ids[u]`` and ``item_ids[i]`` map dense indices back to the
    identifiers in the source file; ``users``, ``items`` and ``ratings`` are
    parallel arrays with one entry per distinct (user, item) pair.
    """

    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray
    user_ids: list
    item_ids: list
    duplicates: int = 0

    @property
    def n_users(self):
        return len(self.user_ids)

    @property
    def n_items(self):
        return len(self.item_ids)

    def __len__(self):
        return int(self.ratings.shape[0])

    def to_dense(self):
        """Users-by-items matrix with zeros for missing ratings."""
        A = np.zeros((self.n_users, self.n_items))
        A[self.users, self.items] = self.ratings
        return A

    def interactions(self):
        """Boolean users-by-items matrix of observed ratings."""
        M = np.zeros((self.n_users, self.n_items), dtype=bool)
        M[self.users, self.items] = True
        return M

    @classmethod
    def from_triples(cls, triples, user_ids=None, item_ids=None):
        """Build from ``(user_id, item_id, rating)`` tuples; the last duplicate wins.

        Ids get dense indices in order of first appearance unless explicit
        ``user_ids`` / ``item_ids`` lists fix the index space; triples whose
        ids fall outside a fixed space are dropped.
        """
        fixed_users = user_ids is not None
        fixed_items = item_ids is not None
        user_ids = list(user_ids) if fixed_users else []
        item_ids = list(item_ids) if fixed_items else []
        uidx = {u: k for k, u in enumerate(user_ids)}
        iidx = {i: k for k, i in enumerate(item_ids)}
        cells = {}
        for uid, iid, rating in triples:
            if uid not in uidx:
                if fixed_users:
                    continue
                uidx[uid] = len(user_ids)
                user_ids.append(uid)
            if iid not in iidx:
                if fixed_items:
                    continue
                iidx[iid] = len(item_ids)
                item_ids.append(iid)
            cells[(uidx[uid], iidx[iid])] = float(rating)
        keys = list(cells)
        users = np.array([k[0] for k in keys], dtype=np.intp)
        items = np.array([k[1] for k in keys], dtype=np.intp)
        ratings = np.array([cells[k] for k in keys], dtype=np.float64)
        return cls(users, items, ratings, user_ids, item_ids)


def _split_line(line, fmt):
    if fmt == "movielens_dat":
        return line.split("::")
    return next(csv.reader([line]))


def parse_ratings(lines, fmt="csv"):
    """Parse ratings from an iterable of text lines.

    ``fmt`` is ``"csv"`` (``user,item,rating[,timestamp]``, optional header
    line) or ``"movielens_dat"`` (``user::item::rating::timestamp``).  Blank
    lines are skipped.  Duplicate (user, item) pairs keep the last rating;
    the number of dropped duplicates is stored in ``duplicates``.

    Raises
    ------
    ParseError
        With the 1-based line number of the first malformed line.
    EmptyDataset
        If no rating was found.
    """
    if fmt not in ("csv", "movielens_dat"):
        raise ValueError(f"unknown ratings format {fmt!r}")
    triples = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in _split_line(line, fmt)]
        if len(fields) not in (3, 4):
            raise ParseError(f"expected 3 or 4 fields, got {len(fields)}", lineno)
        uid, iid, value = fields[:3]
        try:
            rating = float(value)
        except ValueError:
            if lineno == 1 and fmt == "csv":
                continue  # header
            raise ParseError(f"rating {value!r} is not a number", lineno) from None
        if not np.isfinite(rating):
            raise ParseError(f"rating {value!r} is not finite", lineno)
        if not uid or not iid:
            raise ParseError("empty user or item id", lineno)
        triples.append((uid, iid, rating))
    if not triples:
        raise EmptyDataset("no ratings found")
    ds = RatingsDataset.from_triples(triples)
    ds.duplicates = len(triples) - len(ds)
    if ds.duplicates:
        log.warning("dropped %d duplicate (user, item) ratings; last occurrence kept",
                    ds.duplicates)
    return ds


def load_ratings(path, fmt=None):
    """Load a ratings file; `fmt` is inferred from ``"::"`` in the first line if omitted."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if fmt is None:
        first = next((ln for ln in lines if ln.strip()), "")
        fmt = "movielens_dat" if "::" in first else "csv"
    return parse_ratings(lines, fmt)


def representatives(ds, k, side="items", method="square", tau=1.0, eps=0.05):
    """Dense indices of representative users or items.

    Rank-`k` truncated SVD of the dense ratings matrix, then ``maxvol``
    (exactly `k` indices) or ``rect_maxvol`` (at least `k`) on the user
    factor ``U`` or the item factor ``V``.  Map back to file ids with
    ``ds.user_ids`` / ``ds.item_ids``.

    Raises :class:`RankDeficient` if the ratings matrix has numerical rank
    below `k` (e.g. all ratings zero).
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    k = int(k)
    if not 1 <= k <= min(ds.n_users, ds.n_items):
        raise DimensionError(
            f"k must be in 1..{min(ds.n_users, ds.n_items)}, got {k}")
    factors = svd(ds.to_dense(), k)
    s = factors.sigma
    if s[0] == 0.0 or s[-1] <= RCOND * s[0]:
        raise RankDeficient(f"ratings matrix has numerical rank below k={k}")
    basis = factors.U if side == "users" else factors.V
    if method == "square":
        sel = maxvol(basis, eps=eps)
    elif method == "rect":
        sel = rect_maxvol(basis, tau=tau, eps=eps)
    else:
        raise ValueError(f"method must be 'square' or 'rect', got {method!r}")
    return [int(i) for i in sel.row_indices]


def _touch_counts(ds, reps, side):
    # for every counterpart entity, how many representatives it interacts with
    M = ds.interactions()
    reps = np.asarray(reps, dtype=np.intp)
    if side == "items":
        return M[:, reps].sum(axis=1)
    if side == "users":
        return M[reps].sum(axis=0)
    raise ValueError(f"side must be one of {SIDES}, got {side!r}")


def coverage(ds, reps, side="items"):
    """Share of users (items) that rated (were rated by) any representative item (user)."""
    counts = _touch_counts(ds, reps, side)
    return float(np.mean(counts > 0)) if counts.size else 0.0


def diversity(ds, reps, side="items"):
    """Share of counterpart entities touching at least one but fewer than 10% of the representatives."""
    counts = _touch_counts(ds, reps, side)
    if counts.size == 0:
        return 0.0
    limit = 0.1 * len(reps)
    return float(np.mean((counts >= 1) & (counts < limit)))


class PrecisionResult(NamedTuple):
    precision: float
    n_users: int

    @property
    def defined(self):
        return self.n_users > 0


def precision_at_n(train, test, reps, n=10, good_threshold=4.0):
    """Precision at `n` of recommendations reconstructed from representative items.

    Every train row is projected by least squares onto the columns of the
    representative items, ``A_hat = A[:, reps] @ pinv(A[:, reps]) @ A``.
    For each user with at least one test rating, the `n` highest predicted
    items not rated in train are recommended; a recommendation is good if
    the user's test rating is ``>= good_threshold``.  Test ids unknown to
    `train` are ignored.

    Returns
    -------
    PrecisionResult
        ``precision`` averaged over evaluated users (0.0 when none were, in
        which case ``defined`` is False) and ``n_users``.
    """
    A = train.to_dense()
    reps = np.asarray(reps, dtype=np.intp)
    basis = A[:, reps]
    scores = basis @ np.linalg.lstsq(basis, A, rcond=1e-12)[0]
    rated = train.interactions()

    aligned = RatingsDataset.from_triples(
        ((test.user_ids[u], test.item_ids[i], r)
         for u, i, r in zip(test.users, test.items, test.ratings)),
        user_ids=train.user_ids, item_ids=train.item_ids,
    )
    truth = np.full(A.shape, np.nan)
    truth[aligned.users, aligned.items] = aligned.ratings

    total, count = 0.0, 0
    for u in np.unique(aligned.users):
        candidates = np.flatnonzero(~rated[u])
        if candidates.size == 0:
            continue
        # stable sort on negated scores: equal scores keep item order
        order = np.argsort(-scores[u, candidates], kind="stable")
        top = candidates[order[:n]]
        hits = np.sum(truth[u, top] >= good_threshold)
        total += hits / top.size
        count += 1
    return PrecisionResult(total / count if count else 0.0, count)


def train_test_split(ds, test_fraction=0.2, seed=0):
    """User-wise random split: each user's ratings go to test with probability `test_fraction`.

    Users keep at least one train rating.  Both parts share the index space
    of `ds`.
    """
    rng = np.random.default_rng(seed)
    to_test = rng.random(len(ds)) < test_fraction
    for u in range(ds.n_users):
        mine = np.flatnonzero(ds.users == u)
        if mine.size and to_test[mine].all():
            to_test[mine[0]] = False

    def part(mask):
        return RatingsDataset(ds.users[mask], ds.items[mask], ds.ratings[mask],
                              list(ds.user_ids), list(ds.item_ids))

    return part(~to_test), part(to_test)
