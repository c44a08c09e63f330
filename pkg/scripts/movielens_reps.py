#!/usr/bin/env python3
"""Representative movies on MovieLens 10M.

Downloads ml-10m.zip, splits the ratings 80/20 per user with a fixed seed
and prints coverage, diversity and precision at 10 of square and
rectangular representative items for each k as JSON lines.  The dense
ratings matrix is about 70k x 10.7k (6 GB); not part of the test suite.

    python scripts/movielens_reps.py --k 10 20 50
"""

import argparse
import json
import urllib.request
import zipfile
from pathlib import Path

from maxvolkit.recsys import (
    coverage,
    diversity,
    load_ratings,
    precision_at_n,
    representatives,
    train_test_split,
)

URL = "https://files.grouplens.org/datasets/movielens/ml-10m.zip"


def fetch(cache):
    target = cache / "ml-10M100K" / "ratings.dat"
    if not target.exists():
        cache.mkdir(parents=True, exist_ok=True)
        archive = cache / "ml-10m.zip"
        urllib.request.urlretrieve(URL, archive)
        with zipfile.ZipFile(archive) as zf:
            zf.extract("ml-10M100K/ratings.dat", cache)
    return target


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--cache", type=Path, default=Path("data"))
    p.add_argument("--k", type=int, nargs="+", default=[10, 20, 50])
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    ds = load_ratings(fetch(args.cache), "movielens_dat")
    train, test = train_test_split(ds, 0.2, args.seed)
    for k in args.k:
        for method in ("square", "rect"):
            reps = representatives(train, k, "items", method, tau=1.0)
            row = {
                "k": k,
                "method": method,
                "count": len(reps),
                "coverage": coverage(train, reps),
                "diversity": diversity(train, reps),
                "precision_at_10": precision_at_n(train, test, reps, 10).precision,
            }
            print(json.dumps(row), flush=True)


if __name__ == "__main__":
    main()
