"""Benchmark the numba hot kernels against the pure-numpy fallbacks.

Run as a script:  python3 benchmarks/bench_kernels.py
The numba path can be disabled package-wide with SHEETLAB_NO_NUMBA=1; this
script imports both implementations directly so a single run compares them.
"""

import time

import numpy as np

from sheetlab import _kernels as K


def timeit(fn, *args, repeat=5):
    fn(*args)  # warm-up (jit compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(name, np_fn, nb_fn, *args):
    t_np = timeit(np_fn, *args)
    if nb_fn is None:
        print(f"{name:16s} numpy {t_np*1e3:8.2f} ms   (numba unavailable)")
        return
    t_nb = timeit(nb_fn, *args)
    print(f"{name:16s} numpy {t_np*1e3:8.2f} ms   numba {t_nb*1e3:8.2f} ms"
          f"   speedup x{t_np/t_nb:5.1f}")


def main():
    rng = np.random.default_rng(0)

    codes = rng.integers(0, 200_000, size=2_000_000)
    vals = rng.normal(size=(500_000, 3))
    center = np.zeros(3)
    radii = np.linspace(0.1, 3.0, 16)
    field = rng.normal(size=(2049, 2049))

    nb = K.USE_NUMBA
    print(f"numba available: {nb}")
    bench("count_occupied", K._count_occupied_np,
          K._count_occupied_nb if nb else None, codes)
    bench("count_balls", K._count_balls_np,
          K._count_balls_nb if nb else None, vals, center, radii)
    bench("block_minmax", K._block_minmax_np,
          K._block_minmax_nb if nb else None, field, 8)


if __name__ == "__main__":
    main()
