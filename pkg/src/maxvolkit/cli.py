"""
Command-line front end.  Every subcommand prints one JSON report on stdout;
human-readable notes and diagnostics go to stderr.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 numerical
failure (rank deficiency, iteration limit).

Random matrices come from numpy's PCG64 bit generator; trial ``t`` of a run
with ``--seed S`` uses ``numpy.random.default_rng(S + t)``, so the output
does not depend on how trials are spread over worker threads
(``MAXVOLKIT_THREADS`` caps the worker count).
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import EmptyDataset, IterationLimit, MaxvolError, ParseError, RankDeficient
from .mmio import read_matrix
from .maxvol import maxvol
from .precond import compare_methods, solve_via_augmented
from .recsys import coverage, diversity, load_ratings, precision_at_n, representatives
from .rect_maxvol import rect_maxvol
from .skeleton import build_pseudo_skeleton, max_element_trial, select_skeleton, skeleton_errors

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
HIST_BINS = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _note(msg):
    print(msg, file=sys.stderr)


def worker_count(jobs):
    cap = os.environ.get("MAXVOLKIT_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise UsageError(f"MAXVOLKIT_THREADS must be an integer, got {cap!r}") from None
    return max(1, min(n, jobs))


def _stats(values):
    v = np.asarray(values, dtype=float)
    counts, edges = np.histogram(v, bins=HIST_BINS, range=(0.0, 1.0))
    return {
        "count": int(v.size),
        "min": float(v.min()),
        "max": float(v.max()),
        "mean": float(v.mean()),
        "median": float(np.median(v)),
        "exact_hits": int(np.sum(v == 1.0)),
        "histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
    }


def cmd_maxvol(args):
    A = read_matrix(args.input)
    res = maxvol(A, eps=args.eps, max_iters=args.max_iters)
    report = {
        "indices": res.row_indices.tolist(),
        "K": res.K,
        "max_abs_C": float(np.abs(res.C).max()),
        "iterations": res.iterations,
        "converged": res.converged,
        "log_volume": res.log_volume,
    }
    if not res.converged:
        return report, IterationLimit(f"maxvol stopped after {res.iterations} swaps "
                                      f"with max|C| > {1 + args.eps}")
    return report, None


def cmd_rectmaxvol(args):
    A = read_matrix(args.input)
    res = rect_maxvol(A, tau=args.tau, min_K=args.min_k, max_K=args.max_k,
                      identity_hat=args.identity_hat, eps=args.eps)
    norms = np.linalg.norm(res.C, axis=1)
    mask = np.ones(A.shape[0], dtype=bool)
    mask[res.row_indices] = False
    report = {
        "indices": res.row_indices.tolist(),
        "K": res.K,
        "max_row_norm": float(norms.max()),
        "max_unselected_row_norm": float(norms[mask].max()) if mask.any() else 0.0,
        "log_volume": res.log_volume,
        "hat_C_mode": res.hat_C_mode,
    }
    return report, None


def cmd_cur(args):
    A = read_matrix(args.input)
    rows, cols = select_skeleton(A, args.rank, args.method, args.tau, args.eps)
    approx = build_pseudo_skeleton(A, rows, cols)
    report = {
        "row_indices": rows.tolist(),
        "col_indices": cols.tolist(),
        "errors": skeleton_errors(A, approx),
    }
    return report, None


def cmd_maxelem(args):
    for name in ("rank", "n", "m", "trials"):
        if getattr(args, name) < 1:
            raise UsageError(f"--{name} must be positive")
    if args.rank > min(args.n, args.m):
        raise UsageError("--rank must not exceed --n or --m")
    methods = ("square", "rect") if args.method == "both" else (args.method,)

    def trial(t):
        return max_element_trial(args.n, args.m, args.rank, args.seed + t,
                                 methods, args.tau, args.eps)

    with ThreadPoolExecutor(max_workers=worker_count(args.trials)) as pool:
        results = list(pool.map(trial, range(args.trials)))
    report = {m: _stats([r[m] for r in results]) for m in methods}
    if len(methods) == 2:
        report["rect_ge_square"] = int(sum(r["rect"] >= r["square"] for r in results))
    return report, None


def cmd_precond(args):
    A = read_matrix(args.input)
    if A.shape[0] < A.shape[1]:
        _note(f"input is {A.shape[0]}x{A.shape[1]}; using its transpose")
        A = np.ascontiguousarray(A.T)
    methods = ("square", "rect") if args.method == "both" else (args.method,)
    b = None
    if args.rhs:
        b = read_matrix(args.rhs).reshape(-1)
        if b.shape[0] != A.shape[0]:
            raise UsageError(f"rhs has {b.shape[0]} entries, matrix has {A.shape[0]} rows")
    table = compare_methods(A, args.tau, args.eps, methods)
    report = {"shape": list(A.shape)}
    for method in methods:
        row = dict(table[method])
        elapsed = row.pop("time")
        if args.timings:
            row["time"] = elapsed
        if b is not None:
            t0 = time.perf_counter()
            x, residual, _ = solve_via_augmented(A, b, method, args.tau, args.eps)
            solve_time = time.perf_counter() - t0
            row["solution"] = x.tolist()
            row["residual_norm"] = residual
            if args.timings:
                row["solve_time"] = solve_time
        report[method] = row
        _note(f"{method}: K={row['K']} ||C||_2={row['C_norm']:.4g} time={elapsed:.3f}s")
    return report, None


def cmd_recsys(args):
    ds = load_ratings(args.ratings, None if args.format == "auto" else args.format)
    if not 1 <= args.k <= min(ds.n_users, ds.n_items):
        raise UsageError(f"--k must be within 1..{min(ds.n_users, ds.n_items)}")
    reps = representatives(ds, args.k, args.side, args.method, args.tau, args.eps)
    ids = ds.user_ids if args.side == "users" else ds.item_ids
    report = {
        "n_users": ds.n_users,
        "n_items": ds.n_items,
        "n_ratings": len(ds),
        "duplicates": ds.duplicates,
        "representatives": {"indices": reps, "ids": [ids[i] for i in reps], "count": len(reps)},
    }
    metrics = {}
    wanted = [m.strip() for m in args.metrics.split(",") if m.strip()] if args.metrics else []
    for name in wanted:
        if name == "coverage":
            metrics["coverage"] = coverage(ds, reps, args.side)
        elif name == "diversity":
            metrics["diversity"] = diversity(ds, reps, args.side)
        else:
            raise UsageError(f"unknown metric {name!r}; choose coverage, diversity")
    if args.test:
        if args.side != "items":
            raise UsageError("--test precision needs --side items")
        test = load_ratings(args.test, None if args.format == "auto" else args.format)
        prec = precision_at_n(ds, test, reps, args.precision_at, args.good_threshold)
        metrics[f"precision_at_{args.precision_at}"] = prec.precision
        metrics["precision_users"] = prec.n_users
        if not prec.defined:
            _note("no test user overlaps the training data; precision reported as 0.0")
    report["metrics"] = metrics
    return report, None


def build_parser():
    p = _Parser(prog="maxvolkit", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("maxvol", help="square maximal-volume rows")
    s.add_argument("--input", required=True)
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--max-iters", type=int, default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_maxvol)

    s = sub.add_parser("rectmaxvol", help="rectangular 2-volume rows")
    s.add_argument("--input", required=True)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--min-k", type=int, default=None)
    s.add_argument("--max-k", type=int, default=None)
    s.add_argument("--identity-hat", action="store_true")
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--out")
    s.set_defaults(func=cmd_rectmaxvol)

    s = sub.add_parser("cur", help="pseudo-skeleton approximation")
    s.add_argument("--input", required=True)
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--method", choices=("square", "rect"), default="square")
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--out")
    s.set_defaults(func=cmd_cur)

    s = sub.add_parser("maxelem", help="max-modulus entry search on random low-rank matrices")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--method", choices=("square", "rect", "both"), default="both")
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--out")
    s.set_defaults(func=cmd_maxelem)

    s = sub.add_parser("precond", help="augmented-system preconditioning report")
    s.add_argument("--input", required=True)
    s.add_argument("--method", choices=("square", "rect", "both"), default="both")
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--rhs")
    s.add_argument("--timings", action="store_true",
                   help="include wall times in the JSON (breaks byte-identical reruns)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_precond)

    s = sub.add_parser("recsys", help="representative users/items and their metrics")
    s.add_argument("--ratings", required=True)
    s.add_argument("--format", choices=("auto", "csv", "movielens_dat"), default="auto")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--side", choices=("users", "items"), default="items")
    s.add_argument("--method", choices=("square", "rect"), default="square")
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--metrics", default="coverage,diversity")
    s.add_argument("--test")
    s.add_argument("--precision-at", type=int, default=10)
    s.add_argument("--good-threshold", type=float, default=4.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_recsys)
    return p


def _render(args, report):
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    doc = {"command": args.command, "version": __version__, "flags": flags, "result": report}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def run(argv=None, stdout=None):
    """Run the CLI on `argv` and return the exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report, failure = args.func(args)
    except UsageError as exc:
        _note(f"maxvolkit: usage error: {exc}")
        return EXIT_USAGE
    except (OSError, ParseError, EmptyDataset) as exc:
        _note(f"maxvolkit: {exc}")
        return EXIT_IO
    except (RankDeficient, IterationLimit) as exc:
        _note(f"maxvolkit: numerical failure: {exc}")
        return EXIT_NUMERIC
    except (MaxvolError, ValueError) as exc:
        _note(f"maxvolkit: usage error: {exc}")
        return EXIT_USAGE
    text = _render(args, report)
    stdout.write(text)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            _note(f"maxvolkit: {exc}")
            return EXIT_IO
    if failure is not None:
        _note(f"maxvolkit: numerical failure: {failure}")
        return EXIT_NUMERIC
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
