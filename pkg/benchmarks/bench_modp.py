"""Time the compiled modular echelon kernel against its pure-Python twin.

The inputs are the direct constraint matrices of first prolongations of zoo
varieties, reduced modulo a 62-bit prime. Both kernels must return the same
echelon form; the script exits 1 otherwise.

    python3 benchmarks/bench_modp.py --cases segre(2,3) spinor_s5 --repeat 3
"""
import argparse
import sys
import time

import numpy as np

from prolab import _backend, probes, zoo
from prolab.linalg import DEFAULT_PRIME
from prolab.prolong import direct_constraints

DEFAULT_CASES = ("quadric(5)", "segre(2,3)", "veronese(3)", "plucker_gr2(5)", "spinor_s5")


def csr_mod_p(M, p):
    indptr, cols, vals = [0], [], []
    for row in M.rows():
        for j in sorted(row):
            x = row[j]
            v = x.numerator * pow(x.denominator, -1, p) % p
            if v:
                cols.append(j)
                vals.append(v)
        indptr.append(len(cols))
    return (np.asarray(indptr, dtype=np.int64), np.asarray(cols, dtype=np.int64),
            np.asarray(vals, dtype=np.uint64))


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    return len(a) == len(b) and all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", nargs="+", default=list(DEFAULT_CASES))
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    ap.add_argument("--rank-only", action="store_true", help="skip back substitution")
    args = ap.parse_args(argv)

    compiled = _backend.compiled_echelon()
    if compiled is None:
        print("compiled extension not built; run `python3 setup.py build_ext --inplace`", file=sys.stderr)
        return 2

    print(f"{'case':<18}{'shape':>16}{'nnz':>9}{'rank':>7}{'python s':>11}{'compiled s':>12}{'speedup':>9}")
    status = 0
    for vid in args.cases:
        g = probes.aut_of(zoo.build(vid))
        M = direct_constraints(g, 1)
        indptr, cols, vals = csr_mod_p(M, args.prime)
        call = (indptr, cols, vals, M.ncols, args.prime, not args.rank_only)
        tp, rp = best_of(lambda: _backend.python_echelon(*call), args.repeat)
        tc, rc = best_of(lambda: compiled(*call), args.repeat)
        if not same(rp, rc):
            print(f"{vid}: kernels disagree", file=sys.stderr)
            status = 1
        shape = f"{M.nrows}x{M.ncols}"
        print(f"{vid:<18}{shape:>16}{len(cols):>9}{len(rc[0]):>7}{tp:>11.4f}{tc:>12.4f}{tp / tc:>8.1f}x")
    return status


if __name__ == "__main__":
    sys.exit(main())
