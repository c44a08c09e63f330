#!/usr/bin/env python3
"""Preconditioning comparison on SuiteSparse least-squares matrices.

Downloads each matrix (cached under --cache), transposes wide ones, and
prints K, ||C||_2 and wall time for square and rectangular selection as
JSON lines.  The matrices are densified: Kemelmacher needs about 2.2 GB of
memory and the runs take hours.  Not part of the test suite.

    python scripts/table1_precond.py --cache ~/.cache/maxvolkit
"""

import argparse
import json
import tarfile
import urllib.request
from pathlib import Path

from maxvolkit.mmio import read_matrix
from maxvolkit.precond import compare_methods

MATRICES = {
    "illc1850": "https://sparse.tamu.edu/MM/HB/illc1850.tar.gz",
    "lp_osa_07": "https://sparse.tamu.edu/MM/LPnetlib/lp_osa_07.tar.gz",
    "Kemelmacher": "https://sparse.tamu.edu/MM/Kemelmacher/Kemelmacher.tar.gz",
}


def fetch(name, url, cache):
    target = cache / name / f"{name}.mtx"
    if not target.exists():
        cache.mkdir(parents=True, exist_ok=True)
        archive = cache / f"{name}.tar.gz"
        urllib.request.urlretrieve(url, archive)
        with tarfile.open(archive) as tar:
            # the extraction filter exists from 3.10.12 / 3.11.4 on
            kw = {"filter": "data"} if hasattr(tarfile, "data_filter") else {}
            tar.extractall(cache, **kw)
    return target


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--cache", type=Path, default=Path("data"))
    p.add_argument("--only", nargs="*", choices=sorted(MATRICES))
    p.add_argument("--tau", type=float, default=1.0)
    args = p.parse_args()
    for name in args.only or MATRICES:
        A = read_matrix(fetch(name, MATRICES[name], args.cache))
        if A.shape[0] < A.shape[1]:
            A = A.T.copy()
        report = compare_methods(A, tau=args.tau)
        print(json.dumps({"matrix": name, "shape": list(A.shape), **report}), flush=True)


if __name__ == "__main__":
    main()
