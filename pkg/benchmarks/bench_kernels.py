"""Compiled kernels against their interpreted twins.

    python benchmarks/bench_kernels.py [--repeat N]

Set ADELIC_HEIGHTS_NUMBA=0 to see that the library still runs without numba;
this script needs the compiled path to have something to compare against.
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from adelic_heights import _kernels as K
from adelic_heights.orbit_index import lattice_orbit_index


def best_of(fn, repeat):
    fn()  # compile and warm caches
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    p, k = 5, 6
    pk = p ** k
    cols = rng.integers(0, pk, size=(40, 3, 3)).astype(np.int64)

    def hnf(fn):
        return lambda: [fn(c, p, k, pk) for c in cols]

    lat = np.stack([np.diag([p ** 2] * 3).astype(np.int64)] * 200)
    g = rng.integers(0, pk * p, size=(3, 3)).astype(np.int64)

    def apply(fn):
        def run():
            out = np.zeros_like(lat)
            status = np.zeros(len(lat), dtype=np.int8)
            fn(lat, g, 1, p, k, pk, 6, out, status)
        return run

    w = np.zeros((2, 2), dtype=np.int64)
    yield "hnf_mod (40 x 3x3, mod 5^6)", hnf(K.hnf_mod), hnf(K.interpreted(K.hnf_mod))
    yield "apply_generator (200 lattices)", apply(K.apply_generator), apply(K.interpreted(K.apply_generator))
    yield "count_invertible_mod (2x2 over F_3)", (lambda: K.count_invertible_mod(2, 3)), \
        (lambda: K.interpreted(K.count_invertible_mod)(2, 3))
    yield "torsion_scan (2x2, box 2)", (lambda: K.torsion_scan(2, 2, 3, 6, w)), \
        (lambda: K.interpreted(K.torsion_scan)(2, 2, 3, 6, w))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not K.USE_NUMBA:
        raise SystemExit("numba is disabled; nothing to compare")
    print(f"{'kernel':40} {'compiled':>12} {'interpreted':>12} {'speedup':>9}")
    for name, fast, slow in cases():
        tf, ts = best_of(fast, args.repeat), best_of(slow, args.repeat)
        print(f"{name:40} {tf * 1e3:10.2f}ms {ts * 1e3:10.2f}ms {ts / tf:8.1f}x")
    t = time.perf_counter()
    rep = lattice_orbit_index([[[1, Fraction(1, 7 ** 6)], [0, 1]]], 7, 10 ** 6)
    print(f"end to end: orbit of size {rep.index} in {time.perf_counter() - t:.2f}s")


if __name__ == "__main__":
    main()
