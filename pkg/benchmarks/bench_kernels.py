"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

The numba timings exclude the first (compiling) call.
"""

import argparse
import time

import numpy as np

from hybridqubit import kernels
from hybridqubit.encoded import sz_block


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def sequence_case(rng, n_pulse=18, n_pop=48):
    space = sz_block(6, -2)
    pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
    perms = np.array([space.swap_permutation(*pairs[k]) for k in rng.integers(0, 5, n_pulse)])
    cols = rng.standard_normal((space.dim, 4)).astype(complex)
    return cols, perms, rng.random((n_pop, n_pulse))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    cols, perms, taus = sequence_case(rng)
    h = np.array([[0.0, 2e-4], [2e-4, 0.05]], dtype=complex)
    m = np.array([[0, 1.2247], [1.2247, 0]], dtype=complex)
    prop = (h, m, 1e-3, 7.6e10, 4e-13, 20000, False, 6.582119569e-13, np.array([1, 0], dtype=complex))

    rows = []
    if kernels.HAVE_NUMBA:
        kernels.evolve_columns(cols, perms, taus)
        kernels.propagate(*prop)
        rows.append(("evolve_columns", "numba", best_of(lambda: kernels.evolve_columns(cols, perms, taus), args.repeat)))
        rows.append(("propagate", "numba", best_of(lambda: kernels.propagate(*prop), max(1, args.repeat // 4))))
    else:
        print("numba unavailable or disabled; timing the numpy path only")
    rows.append(("evolve_columns", "numpy", best_of(lambda: kernels.evolve_columns_numpy(cols, perms, taus), args.repeat)))
    rows.append(("propagate", "numpy", best_of(lambda: kernels.propagate_numpy(*prop), max(1, args.repeat // 4))))

    print(f"{'kernel':16s} {'backend':8s} {'best (ms)':>10s}")
    for name, be, t in rows:
        print(f"{name:16s} {be:8s} {1e3 * t:10.3f}")
    if kernels.HAVE_NUMBA:
        for name in ("evolve_columns", "propagate"):
            nb = next(t for n, b, t in rows if n == name and b == "numba")
            np_ = next(t for n, b, t in rows if n == name and b == "numpy")
            print(f"{name}: numba speedup x{np_ / nb:.1f}")


if __name__ == "__main__":
    main()
