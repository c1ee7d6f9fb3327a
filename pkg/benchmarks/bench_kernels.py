"""Time the numba and pure-numpy kernel paths on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from cflevels import _kernels
from cflevels.dimension import chebyshev_grid


def best_of(fn, repeat):
    fn()  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    x, bary = chebyshev_grid(32)
    logw = np.random.default_rng(0).uniform(0, 40, 1 << 20)
    return {
        "continuant_levels(M=2, depth=18)": lambda impl: impl.continuant_levels(2, 18, 1, 2),
        "continuant_levels(M=5, depth=8)": lambda impl: impl.continuant_levels(5, 8, 1, 5),
        "log_partition(2^20 words)": lambda impl: impl.log_partition(logw, 0.53),
        "collocation_matrix(order=32, amax=2000)": lambda impl: impl.collocation_matrix(0.8, x, bary, 2000),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels.numba_impl is None:
        print("numba unavailable; only the numpy path can run")
    print(f"{'kernel':44s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, call in cases().items():
        t_np = best_of(lambda: call(_kernels.numpy_impl), args.repeat)
        if _kernels.numba_impl is not None:
            t_nb = best_of(lambda: call(_kernels.numba_impl), args.repeat)
            print(f"{name:44s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}")
        else:
            print(f"{name:44s} {t_np:10.4f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
