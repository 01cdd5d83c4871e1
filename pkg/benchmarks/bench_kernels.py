"""Compare the numba and numpy implementations of the hot kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Both implementations are called directly, so the PDET_DISABLE_NUMBA flag
does not matter here. Results are checked for equality before timing.
"""
import argparse
import json
import time

import numpy as np

from pdet import _kernels as k
from pdet.diffop import bundled_operator
from pdet.monodromy import operator_polys


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_bareiss(n, deg, p, repeat, rng):
    M = rng.integers(0, p, size=(n, n, 2 * n * (deg + 1) + 2), dtype=np.int64)
    M[:, :, deg + 1:] = 0
    a = k._bareiss_modp_nb(M, np.int64(p))
    b = k._bareiss_modp_np(M, p)
    assert np.array_equal(a % p, b % p), "backends disagree on Bareiss"
    return {"kernel": f"bareiss n={n} deg={deg} p={p}",
            "numba_s": _best(lambda: k._bareiss_modp_nb(M, np.int64(p)), repeat),
            "numpy_s": _best(lambda: k._bareiss_modp_np(M, p), repeat)}


def bench_holonomy(steps, repeat):
    C = np.ascontiguousarray(operator_polys(bundled_operator("intro"), 0.01), dtype=np.complex128)
    a = k._holonomy_nb(C, 0.5, steps)
    b = k._holonomy_np(C, 0.5, steps)
    assert np.allclose(a, b, atol=1e-9), "backends disagree on holonomy"
    return {"kernel": f"holonomy steps={steps}",
            "numba_s": _best(lambda: k._holonomy_nb(C, 0.5, steps), repeat),
            "numpy_s": _best(lambda: k._holonomy_np(C, 0.5, steps), repeat)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    rows = [bench_bareiss(13, 2, 13, args.repeat, rng),
            bench_bareiss(31, 3, 31, args.repeat, rng),
            bench_holonomy(4096, args.repeat)]
    for r in rows:
        r["speedup"] = r["numpy_s"] / r["numba_s"] if r["numba_s"] else float("inf")
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'kernel':<32} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8}")
    for r in rows:
        print(f"{r['kernel']:<32} {r['numba_s']:>10.4f} {r['numpy_s']:>10.4f} {r['speedup']:>7.1f}x")


if __name__ == "__main__":
    main()
