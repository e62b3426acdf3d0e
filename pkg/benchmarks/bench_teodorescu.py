"""Compare the compiled and numpy Cauchy-sum backends.

Times one node-to-node application of T (every node is both source and
target) for a batch of densities, on a few disk rules, and checks that
both backends agree.

    python3 benchmarks/bench_teodorescu.py [--rules 16x32 32x64 64x128] [--k 6]
"""

import argparse
import time

import numpy as np

from vekua_bergman import _cauchy_py
from vekua_bergman.geometry import build_disk

try:
    from vekua_bergman._cauchy import cauchy_sum as compiled
except ImportError:  # extension not built
    compiled = None


def _time(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rules", nargs="+", default=["16x32", "32x64", "64x128"])
    ap.add_argument("--k", type=int, default=6, help="densities per application")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if compiled is None:
        print("compiled extension not built; timing the numpy fallback only")
    rng = np.random.default_rng(0)
    print(f"{'rule':>8} {'nodes':>7} {'cython s':>10} {'numpy s':>10} {'speedup':>8} {'max diff':>10}")
    for rule in args.rules:
        nr, nt = (int(v) for v in rule.split("x"))
        d = build_disk(0j, 1.0, nr, nt)
        q = (rng.standard_normal((args.k, d.size)) + 1j * rng.standard_normal((args.k, d.size)))
        q *= d.weights / np.pi
        call = (d.nodes.real.copy(), d.nodes.imag.copy(), d.nodes.real.copy(), d.nodes.imag.copy(),
                np.ascontiguousarray(q.real), np.ascontiguousarray(q.imag), 0.5 * d.h)
        t_py, (re_py, im_py) = _time(_cauchy_py.cauchy_sum, call, args.repeat)
        if compiled is None:
            print(f"{rule:>8} {d.size:>7} {'-':>10} {t_py:>10.3f} {'-':>8} {'-':>10}")
            continue
        t_c, (re_c, im_c) = _time(compiled, call, args.repeat)
        diff = max(np.abs(re_c - re_py).max(), np.abs(im_c - im_py).max())
        print(f"{rule:>8} {d.size:>7} {t_c:>10.3f} {t_py:>10.3f} {t_py / t_c:>8.2f} {diff:>10.2e}")


if __name__ == "__main__":
    main()
