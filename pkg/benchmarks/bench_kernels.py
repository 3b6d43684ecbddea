"""Compare the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel gets identical
random inputs on both backends; outputs are checked to agree before timings
are reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from netcomp import _pykernels

try:
    from netcomp import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(rng):
    a2 = rng.integers(0, 2, (6, 14))
    a3 = rng.integers(0, 3, (5, 12))
    big = rng.integers(0, 7, (60, 60))
    keys = rng.integers(0, 1 << 20, 1 << 20).astype(np.int64)
    vals = keys * 3 % 1009
    table = _pykernels.rank_table(a3, 3)
    return [
        ("rank_mod_p 60x60 GF(7)", lambda m: m.rank_mod_p(big, 7)),
        ("rank_table 6x14 GF(2)", lambda m: m.rank_table(a2, 2)),
        ("rank_table 5x12 GF(3)", lambda m: m.rank_table(a3, 3)),
        ("first_conflict 2^20 keys", lambda m: m.first_conflict(keys, vals)),
        ("rank_axiom_violations n=12", lambda m: m.rank_axiom_violations(table, 12, 10)),
    ]


def same(x, y) -> bool:
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return np.array_equal(np.asarray(x), np.asarray(y))
    return x == y


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':32} {'numpy s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, call in cases(rng):
        py = best_of(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:32} {py:10.4f} {'n/a':>11} {'n/a':>8}")
            continue
        if not same(call(_pykernels), call(_ckernels)):
            raise SystemExit(f"{name}: backends disagree")
        c = best_of(lambda: call(_ckernels), args.repeat)
        print(f"{name:32} {py:10.4f} {c:11.4f} {py / c:7.1f}x")


if __name__ == "__main__":
    main()
