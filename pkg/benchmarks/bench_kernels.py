"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from jscc_exponents import _core_py

try:
    from jscc_exponents import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(rng):
    W = rng.dirichlet(np.ones(8), size=6)
    rhos = np.linspace(0.01, 1.0, 100)
    p0 = np.full(6, 1 / 6)
    A = rng.uniform(size=(4, 4))
    M = A + A.T
    return {
        "arimoto_sweep 6x8, 100 rho": lambda k: k.arimoto_sweep(rhos, W, p0, 1e-12, 2000),
        "blahut_arimoto 6x8": lambda k: k.blahut_arimoto(W, p0, 1e-12, 100000),
        "simplex_grid_min 4 inputs, n=60": lambda k: k.simplex_grid_min(M, 60),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for name, run in cases(rng).items():
        tp, ref = best_of(lambda: run(_core_py), args.repeat)
        if _core is None:
            print(f"{name:34s} {tp:10.4f} {'n/a':>11s} {'':>8s}")
            continue
        tc, out = best_of(lambda: run(_core), args.repeat)
        # same answer from both backends
        np.testing.assert_allclose(np.asarray(out[0]), np.asarray(ref[0]), atol=1e-10)
        print(f"{name:34s} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
