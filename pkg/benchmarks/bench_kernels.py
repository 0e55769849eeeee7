"""Compare the compiled and pure-Python generation kernels.

    python benchmarks/bench_kernels.py [--length 200000] [--repeat 3]

Both backends run the same spec, seed and length; the script checks that
their outputs are identical and reports symbols per second for each.
"""

import argparse
import time

import numpy as np

from addmarkov import _pykernels
from addmarkov.chain import linear_memory
from addmarkov.generator import seed_state


def best_time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--length", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--orders", type=int, nargs="+", default=[1, 10, 20])
    args = parser.parse_args()
    try:
        from addmarkov import _kernels
    except ImportError:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")

    print(f"{'kernel':<10} {'N':>3} {'cython sym/s':>14} {'python sym/s':>14} {'speedup':>8}")
    for order in args.orders:
        memory = linear_memory(order, 0.9 / max(order - 1, 1))
        cases = {
            "additive": lambda k: k.run_additive(memory, 0.5, seed_state(42), 0, args.length),
            "stepwise": lambda k: k.run_stepwise(order, 0.3, 0.0, seed_state(42), 0, args.length),
        }
        for name, run in cases.items():
            t_c, out_c = best_time(lambda: run(_kernels), args.repeat)
            t_p, out_p = best_time(lambda: run(_pykernels), 1)
            if not np.array_equal(out_c, out_p):
                raise SystemExit(f"{name} N={order}: backends disagree")
            print(f"{name:<10} {order:>3} {args.length / t_c:>14.3e} {args.length / t_p:>14.3e} "
                  f"{t_p / t_c:>7.0f}x")


if __name__ == "__main__":
    main()
