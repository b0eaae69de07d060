"""Time the compiled numerical kernels against the numpy fallback.

Runs every kernel routine over identical inputs in each importable
backend and reports the median wall time plus the speedup of the
compiled extension.  Sizes cover scalar-heavy (quantile inversion for
simulation) and moderate-array (probability grids) workloads.

Usage: python3 benchmarks/bench_backends.py [--size N] [--repeats R]
"""
import argparse
import time

import numpy as np

from twinmeta._kernel import available_backends


def _bench(func, args, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    times.sort()
    return times[len(times) // 2]


def _workloads(size: int):
    rng = np.random.default_rng(20260817)
    sym = rng.standard_normal(size) * 2.0
    pos = np.abs(sym) + 1e-3
    unit = rng.uniform(1e-6, 1.0 - 1e-6, size)
    frac = rng.uniform(1e-9, 1.0 - 1e-9, size // 100)

    def betainc_loop(mod):
        # t-quantile bisection calls this one point at a time
        def run(values):
            fn = mod.betainc
            for v in values:
                fn(0.5, 12.5, v)
        return run

    # (label, routine or factory, argument tuple)
    return [
        ("erf", "erf", (sym,)),
        ("erfc", "erfc", (sym,)),
        ("norm_cdf", "norm_cdf", (sym,)),
        ("norm_quantile", "norm_quantile", (unit,)),
        ("gammainc_p", "gammainc_p", (0.5, pos)),
        ("gammainc_q", "gammainc_q", (0.5, pos)),
        ("betainc*", betainc_loop, (frac,)),
    ]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=200_000,
                        help="array length per call (default 200000)")
    parser.add_argument("--repeats", type=int, default=9,
                        help="timed repeats per routine, median reported (default 9)")
    args = parser.parse_args()

    backends = available_backends()
    names = list(backends)
    if len(names) < 2:
        print(f"only the {names[0]!r} backend is importable; nothing to compare")

    header = f"{'routine':<14}" + "".join(f"{n + ' (ms)':>16}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(f"array size {args.size}, median of {args.repeats} runs")
    print(header)
    print("-" * len(header))
    for label, routine, call_args in _workloads(args.size):
        medians = []
        for name in names:
            mod = backends[name]
            func = routine(mod) if callable(routine) else getattr(mod, routine)
            func(*call_args)  # warm up
            medians.append(_bench(func, call_args, args.repeats))
        row = f"{label:<14}" + "".join(f"{m * 1e3:>16.3f}" for m in medians)
        if len(medians) == 2:
            row += f"{medians[1] / medians[0]:>9.1f}x"
        print(row)
    print("* scalar loop over size/100 points, matching how quantile inversion calls it")


if __name__ == "__main__":
    main()
