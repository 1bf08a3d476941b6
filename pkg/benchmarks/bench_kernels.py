"""Compiled vs pure-numpy timings for the integration kernels.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]

The numpy path is the undecorated kernel body (``python_version``), the
same code that runs when SUBJET_DISABLE_NUMBA=1.
"""

import argparse
import time

import numpy as np

from subjet import kernels
from subjet._jit import NUMBA_ENABLED, python_version
from subjet.dynamics import acceleration_matrix
from subjet.models import build_lagrangian


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    model = build_lagrangian("charged-particle", {"potential": {"kind": "magnetic", "B": 1.0}})
    g = np.ascontiguousarray(model.params["metric"].g)
    K = np.ascontiguousarray(acceleration_matrix(model, np.zeros(4)))
    v0 = np.array([np.sqrt(1.45), 0.6, 0.0, 0.3])
    rk_args = (np.zeros(4), v0, 0.01, args.steps, 1, g, K)

    rng = np.random.default_rng(0)
    pts = rng.uniform(size=(2000, 4))
    verts = np.cumsum(rng.uniform(-0.01, 0.01, (2000, 4)), axis=0)
    poly_args = (pts, verts)

    print(f"numba enabled: {NUMBA_ENABLED}")
    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}  max |diff|")
    for name, kernel, kargs in (("rk4_uniform_field", kernels.rk4_uniform_field, rk_args),
                                ("polyline_distances", kernels.polyline_distances, poly_args)):
        slow_t, slow = best_of(python_version(kernel), kargs, args.repeat)
        if NUMBA_ENABLED:
            t0 = time.perf_counter()
            kernel(*kargs)
            compile_t = time.perf_counter() - t0
            fast_t, fast = best_of(kernel, kargs, args.repeat)
            a = fast[0] if isinstance(fast, tuple) else fast
            b = slow[0] if isinstance(slow, tuple) else slow
            diff = float(np.max(np.abs(a - b)))
            print(f"{name:<22}{slow_t:>12.4f}{fast_t:>12.4f}{slow_t / fast_t:>10.1f}  {diff:.1e}"
                  f"   (first call incl. compile {compile_t:.2f} s)")
        else:
            print(f"{name:<22}{slow_t:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
