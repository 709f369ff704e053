"""Compare the compiled and numpy kernel backends.

Times each hot kernel on identical inputs, then one full estimate-and-step
iteration (direction sampling included), for every objective.

    python3 benchmarks/bench_kernels.py [--dim 1000] [--k 10] [--repeat 200]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from zobench import _backend
from zobench.estimator import EstimatorConfig, estimate_gradient
from zobench.objectives import ObjectiveKind, ObjectiveSpec
from zobench.optimizers import HyperParams, OptimizerKind, new_state, step
from zobench.sampler import RandomSource


def _best_us(fn, repeat: int) -> float:
    # Best of 5 batches; the minimum is the least noisy estimate on a shared machine.
    return min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat * 1e6


def bench(dim: int, k: int, repeat: int) -> list[tuple[str, str, float, float]]:
    names = ["python"] + (["cython"] if _backend.compiled_available() else [])
    rng = np.random.default_rng(0)
    theta = rng.uniform(-2, 2, dim)
    U = rng.standard_normal((k, dim))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    g = rng.standard_normal(dim)
    rows = []

    for kind in ObjectiveKind:
        times = {}
        for name in names:
            kern = _backend.get(name)
            times[name] = _best_us(lambda: kern.fd_estimate(kind.code, theta, U, 0.005, 0.0), repeat)
        rows.append(("fd_estimate", kind.value, times["python"], times.get("cython", float("nan"))))

    for opt in (OptimizerKind.ZO_ADAMM, OptimizerKind.R_ADAZO):
        times = {}
        for name in names:
            kern = _backend.get(name)
            m, v = np.zeros(dim), np.zeros(dim)
            times[name] = _best_us(lambda: kern.moment_step(opt.mode, theta, g, m, v, 0.9, 0.99, 1e-3, 1e-8), repeat)
        rows.append(("moment_step", opt.value, times["python"], times.get("cython", float("nan"))))

    cfg, hp = EstimatorConfig(0.005, k), HyperParams()
    active = _backend.kernels
    for kind in ObjectiveKind:
        spec = ObjectiveSpec(kind, dim)
        times = {}
        for name in names:
            _backend.kernels = _backend.get(name)
            state = new_state("r-adazo", dim, hp)
            src = RandomSource(1)
            x = [spec.default_theta0()]

            def iteration():
                x[0] = step(state, x[0], estimate_gradient(spec, x[0], cfg, src))

            times[name] = _best_us(iteration, max(1, repeat // 4))
        rows.append(("iteration", kind.value, times["python"], times.get("cython", float("nan"))))
    _backend.kernels = active
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dim", type=int, default=1000)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    print(f"d={args.dim} K={args.k}; microseconds per call (best of 5 batches)")
    print(f"{'kernel':<12} {'case':<11} {'python':>10} {'cython':>10} {'speedup':>8}")
    for kernel, case, py, cy in bench(args.dim, args.k, args.repeat):
        print(f"{kernel:<12} {case:<11} {py:>10.1f} {cy:>10.1f} {py / cy:>7.2f}x")


if __name__ == "__main__":
    main()
