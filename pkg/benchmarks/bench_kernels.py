#!/usr/bin/env python3
"""Benchmark the site-level kernels on both backends.

The hot kernels (backward recursion, resolvent stripping, period-block
products) run over every lattice site; this script times them on a
deep-truncation workload under the numba backend and the pure-NumPy
fallback (JOSTSPEC_NUMBA=0) and prints a side-by-side table.

Usage:
    python benchmarks/bench_kernels.py [--sites 200000] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workload(sites):
    import numpy as np

    from jostspec import coefficients as co

    block = co.periodic_block(2, [1.0, 1.4], [0.1, -0.2])
    pert = co.PerturbationSpec.power(c=0.8, s=0.5, gamma=0.2)
    model = co.make_model(block, pert)
    a, b = model.coefficient_arrays(sites)
    return a, b


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_inner(sites, repeat):
    from jostspec import _kernels

    _kernels.warm_up()
    a, b = _workload(sites)
    zeta = 0.5 + 0.01j
    boundary = (0.3 - 0.9j, 1.0 + 0.0j)
    n_blocks = (len(a) - 1) // 2

    results = {
        "backend": _kernels.backend(),
        "sites": sites,
        "jost_backward": _time(
            lambda: _kernels.jost_backward(a, b, zeta, *boundary), repeat
        ),
        "strip_downward": _time(
            lambda: _kernels.strip_downward(a, b, zeta, 0.3 + 0.9j, len(a) - 1), repeat
        ),
        "period_products": _time(
            lambda: _kernels.period_products(a, b, zeta, 2, n_blocks), repeat
        ),
    }
    print(json.dumps(results))


def run_outer(sites, repeat):
    rows = {}
    for flag in ("1", "0"):
        env = dict(os.environ, JOSTSPEC_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, __file__, "--inner", "--sites", str(sites), "--repeat", str(repeat)],
            capture_output=True,
            text=True,
            env=env,
        )
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            raise SystemExit(1)
        data = json.loads(proc.stdout.strip().splitlines()[-1])
        rows[data["backend"]] = data

    kernels = ("jost_backward", "strip_downward", "period_products")
    print(f"\nkernel timings, best of {repeat}, {sites} sites")
    print(f"{'kernel':<18} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name in kernels:
        t_nb = rows["numba"][name]
        t_np = rows["numpy"][name]
        print(f"{name:<18} {t_nb * 1e3:>10.2f}ms {t_np * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sites", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.inner:
        run_inner(args.sites, args.repeat)
    else:
        run_outer(args.sites, args.repeat)


if __name__ == "__main__":
    main()
