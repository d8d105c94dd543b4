"""Compare the compiled kernels against the pure-Python twin.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row runs the same sweep on both backends, checks the results are
identical and reports the best wall time of N runs.
"""

import argparse
import random
import sys
import time

from bkfix import _pykernels as python

try:
    from bkfix import _ckernels as compiled
except ImportError:
    compiled = None

CASES = [
    ("sweep_basic_lemma", (2, 3)),
    ("sweep_basic_lemma", (3, 3)),
    ("sweep_diagonal", (3, 3)),
    ("sweep_wps_vwps", (3, 3)),
]


def _random_rows(rng, n):
    return [rng.getrandbits(n) for _ in range(n)]


def primitives(backend, rounds=20_000, n=48, seed=1):
    rng = random.Random(seed)
    ra, rb = _random_rows(rng, n), _random_rows(rng, n)
    total = 0
    for _ in range(rounds):
        p = rng.getrandbits(n)
        total += backend.first_equal(ra, p) + backend.boxplus_mask(rb, p)
        total += sum(backend.bk_conjuncts(ra, rb, p, rng.randrange(n)))
    return total


def best_of(fn, args, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if compiled is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 2

    rows = []
    for name, bounds in CASES:
        t_c, r_c = best_of(getattr(compiled, name), bounds, args.repeat)
        t_p, r_p = best_of(getattr(python, name), bounds, 1)
        if tuple(r_c) != tuple(r_p):
            print(f"MISMATCH {name}{bounds}: {r_c} vs {r_p}", file=sys.stderr)
            return 1
        rows.append((f"{name}{bounds}", t_p, t_c))
    t_c, r_c = best_of(primitives, (compiled,), args.repeat)
    t_p, r_p = best_of(primitives, (python,), 1)
    if r_c != r_p:
        print("MISMATCH primitives", file=sys.stderr)
        return 1
    rows.append(("primitives x20000 (n=48)", t_p, t_c))

    width = max(len(r[0]) for r in rows)
    print(f"{'case'.ljust(width)}  {'python':>9}  {'compiled':>9}  {'speedup':>8}")
    for label, t_p, t_c in rows:
        print(f"{label.ljust(width)}  {t_p:8.3f}s  {t_c:8.4f}s  {t_p / t_c:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
