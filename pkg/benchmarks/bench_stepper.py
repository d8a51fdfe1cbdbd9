#!/usr/bin/env python3
"""Benchmark the compiled stepper kernel against the pure-numpy fallback.

Times the raw right-hand side, a single embedded step, and an end-to-end
integration of a gap-regime instance at several matrix sizes.

Usage: python3 benchmarks/bench_stepper.py [--dims 2,4,8,16]
"""

import argparse
import time

import numpy as np

from ellflow import default_config, generate, integrate
from ellflow.backend import get_backend


def time_it(fn, min_time=0.2):
    n, elapsed = 0, 0.0
    t0 = time.perf_counter()
    while elapsed < min_time:
        fn()
        n += 1
        elapsed = time.perf_counter() - t0
    return elapsed / n


def bench_kernel(be, n, rng):
    ups0 = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    ups0 = 0.5 * (ups0 + ups0.conj().T) + 2 * n * np.eye(n)
    y = np.zeros((2, n, n), dtype=np.complex128)
    y[1] = 0.1 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    k = np.empty((7, 2, n, n), dtype=np.complex128)
    y5 = np.empty_like(y)
    yerr = np.empty_like(y)
    ytmp = np.empty_like(y)
    upsw = np.empty((n, n), dtype=np.complex128)
    be.flow_rhs(ups0, y[0], y[1], k[0, 0], k[0, 1])
    t_rhs = time_it(lambda: be.flow_rhs(ups0, y[0], y[1], k[0, 0], k[0, 1]))
    t_step = time_it(lambda: be.flow_step(ups0, y, 1e-3, k, y5, yerr, ytmp, upsw))
    return t_rhs, t_step


def bench_integrate(backend_name, n, monkeypatched):
    import ellflow.flow as flow_mod

    be = get_backend(backend_name)
    old = flow_mod.get_backend
    flow_mod.get_backend = lambda name=None: be
    try:
        scn = generate(1, {"gap_positive"}, n)
        cfg = default_config(scn.problem)
        t0 = time.perf_counter()
        traj = integrate(scn.problem, cfg)
        dt = time.perf_counter() - t0
        return dt, traj.stats["steps"]
    finally:
        flow_mod.get_backend = old


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="2,4,8,16")
    args = ap.parse_args()
    dims = [int(d) for d in args.dims.split(",")]
    rng = np.random.default_rng(0)

    backends = {}
    for name in ("python", "cython"):
        try:
            backends[name] = get_backend(name)
        except ImportError:
            print(f"backend {name!r} unavailable, skipping")

    print(f"{'n':>4} {'kernel':>8} {'rhs [us]':>10} {'step [us]':>10} "
          f"{'integrate [ms]':>15} {'steps':>6}")
    for n in dims:
        rows = {}
        for name, be in backends.items():
            t_rhs, t_step = bench_kernel(be, n, rng)
            t_int, steps = bench_integrate(name, n, True)
            rows[name] = (t_rhs, t_step, t_int, steps)
            print(f"{n:>4} {name:>8} {t_rhs*1e6:>10.2f} {t_step*1e6:>10.2f} "
                  f"{t_int*1e3:>15.1f} {steps:>6}")
        if len(rows) == 2:
            py, cy = rows["python"], rows["cython"]
            print(f"{'':>4} {'speedup':>8} {py[0]/cy[0]:>10.1f}x {py[1]/cy[1]:>9.1f}x "
                  f"{py[2]/cy[2]:>14.1f}x")


if __name__ == "__main__":
    main()
