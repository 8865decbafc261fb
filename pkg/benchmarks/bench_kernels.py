"""Time each hot kernel compiled with numba against its plain-numpy source.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--json]

The compiled path is warmed up once before timing, so compilation (or the
on-disk cache load) is excluded.  With ``RENYICONT_DISABLE_NUMBA=1`` both
columns time the same numpy function.
"""

import argparse
import json
import time

import numpy as np

from renyicont import _kernels as K
from renyicont.entropy import CUTOFF, hermitian_basis


def _density(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = g @ g.conj().T
    return m / np.trace(m).real


def cases():
    rho4, rho8 = _density(4, 0), _density(8, 1)
    eta = K.ptrace_a(rho8, 4, 2)
    pts = np.random.default_rng(2).uniform(-0.55, 0.55, (500, 3))
    x = np.random.default_rng(3).standard_normal(4)
    basis = hermitian_basis(2)
    return {
        "conditional_q (8x8)": (K.conditional_q, (rho8, eta, 4, 0.75, CUTOFF)),
        "fixed_point (8x8, a=2)": (K.fixed_point, (rho8, eta, 4, 2.0, 0.5, 1e-10, 1000, 1e-14)),
        "bloch_grid_q (500 pts)": (K.bloch_grid_q, (rho4, 2, 0.75, pts, CUTOFF)),
        "params_objective (4x4)": (K.params_objective, (x, rho4, 2, 2, 2.0, 1.0, CUTOFF)),
        "conditional_q_grad (8x8)": (K.conditional_q_grad, (K.herm_power(rho8, 0.5, CUTOFF), eta, 4, 2.0, CUTOFF)),
        "hmin_barrier (2x2)": (K.hmin_barrier, (rho4, 2, 2, basis, 1.0, 0.2, 1e-10, 1e-12, 60)),
    }


def best_time(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    args = ap.parse_args(argv)
    rows = []
    for name, (kernel, kargs) in cases().items():
        kernel(*kargs)
        fast = best_time(kernel, kargs, args.repeat)
        slow = best_time(K.pure(kernel), kargs, max(1, args.repeat // 2))
        rows.append({"kernel": name, "compiled_s": fast, "numpy_s": slow, "speedup": slow / fast})
    if args.json:
        print(json.dumps({"backend": K.BACKEND, "rows": rows}, indent=1))
        return
    print(f"backend: {K.BACKEND}")
    print(f"{'kernel':<28} {'compiled':>12} {'numpy':>12} {'speedup':>8}")
    for r in rows:
        print(f"{r['kernel']:<28} {r['compiled_s'] * 1e3:>10.3f}ms {r['numpy_s'] * 1e3:>10.3f}ms {r['speedup']:>7.1f}x")


if __name__ == "__main__":
    main()
