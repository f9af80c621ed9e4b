"""Timing comparison of the pure-Python and compiled kernel backends.

Run:  python3 benchmarks/bench_backends.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from infogeo._backend import fallback
from infogeo.grid import _diff_op, build_grid
from infogeo.measure import make_reference

try:
    from infogeo._backend import _native as native
except ImportError:
    native = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_psi(repeat):
    a = np.linspace(-30.0, 30.0, 200_001)
    rows = []
    for label, impl in (("python", fallback), ("native", native)):
        if impl is None:
            continue
        rows.append((f"psi newton inversion ({label})", _best(lambda: impl.psi_balanced(a), repeat)))
    return rows


def bench_banded(repeat):
    n = 200_001
    u = np.sin(np.linspace(0.0, 40.0, n))
    wint, lo, hi = _diff_op(n, 2, 1e-3)

    rows = []
    for label, impl in (("python", fallback), ("native", native)):
        if impl is None:
            continue
        def run(impl=impl):
            for _ in range(20):
                impl.banded_apply(u, wint, lo, hi)
        rows.append((f"banded second derivative x20 ({label})", _best(run, repeat)))
    return rows


def bench_filter_loop(repeat):
    mu = make_reference(1.0, "smooth")
    grid = build_grid(1, 10.0, 801)
    x = grid.axis
    r = np.exp(mu.log_density_on(grid))
    w = mu.quadrature_weights(grid)
    pi0 = np.exp(-x ** 2)
    pi0 = pi0 / np.sum(w * pi0)
    Gr = r.copy()
    fr = -x * r
    hv = x.copy()
    d2w, d2lo, d2hi = _diff_op(grid.n, 2, grid.h)
    d1w, d1lo, d1hi = _diff_op(grid.n, 1, grid.h)
    rng = np.random.default_rng(0)
    nsteps = 5000
    dt = 1e-4
    dY = 0.1 * dt + np.sqrt(dt) * rng.standard_normal(nsteps)

    rows = []
    for label, impl in (("python", fallback), ("native", native)):
        if impl is None:
            continue
        def run(impl=impl):
            impl.dense_filter_loop(pi0, Gr, fr, r, hv, w, x,
                                   d2w, d2lo, d2hi, d1w, d1lo, d1hi,
                                   dY, dt, True, 1e-300, 0)
        rows.append((f"dense filter loop, {nsteps} steps ({label})", _best(run, repeat)))
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if native is None:
        print("compiled backend unavailable; timing the fallback only")
    rows = []
    rows += bench_psi(args.repeat)
    rows += bench_banded(args.repeat)
    rows += bench_filter_loop(args.repeat)
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  seconds")
    pairs = {}
    for name, secs in rows:
        print(f"{name:<{width}}  {secs:9.4f}")
        base = name.rsplit(" (", 1)[0]
        pairs.setdefault(base, {})[name.rsplit("(", 1)[1].rstrip(")")] = secs
    for base, d in pairs.items():
        if "python" in d and "native" in d and d["native"] > 0:
            print(f"{base}: native speedup x{d['python'] / d['native']:.1f}")


if __name__ == "__main__":
    main()
