"""Compare the compiled RK4 kernel against the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from quadham import kernels
from quadham.hamiltonian import build_hamiltonian
from quadham.model import degenerate_diag_model, oscillator_model
from quadham.poly import CoeffPoly
from quadham.split import build_sigma, solve_connection


def _system(model):
    split = build_sigma(model)
    H = build_hamiltonian(model, split, solve_connection(model, split))
    rhs = H.momentum_gradient() + [-g for g in H.position_gradient()]
    return rhs


def cases():
    q2 = CoeffPoly.var("q2", 2)
    q1 = CoeffPoly.var("q1", 2)
    quartic = degenerate_diag_model(-(q1 * q1 * q1 * q1) / 4 - q1 * q2 * q2 / 2)
    return {"oscillator": (_system(oscillator_model()), [0.0, 1.0, 0.0]),
            "deg1_quartic": (_system(quartic), [0.0, 0.5, 0.1, 0.0, 0.0])}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'case':<14}{'backend':<10}{'best [ms]':>12}{'speedup':>10}")
    for name, (rhs, state0) in cases().items():
        timings = {}
        results = {}
        for backend in ("python", None):
            sysm = kernels.compile_system(rhs, backend)
            label = "python" if backend == "python" else kernels.BACKEND
            run = lambda: sysm.rk4(state0, 1e-4, args.steps)
            results[label] = run()[0]
            timings[label] = min(timeit.repeat(run, number=1, repeat=args.repeat))
        base = timings["python"]
        for label, sec in timings.items():
            print(f"{name:<14}{label:<10}{sec * 1e3:>12.2f}{base / sec:>10.1f}")
        if len(results) == 2:
            a, b = results.values()
            print(f"{'':<14}max |cython - python| = {np.max(np.abs(a - b)):.2e}")


if __name__ == "__main__":
    main()
