"""Benchmark the compiled counting kernels against the numpy fallback.

Times each kernel on one synthetic p-value matrix and an end-to-end
FWER estimation, verifying along the way that both backends return
identical tallies.

    python benchmarks/kernel_bench.py [--reps 200000] [--m 10] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gatekeep import HierarchyPlan, Procedure, SimulationConfig, exchangeable_corr
from gatekeep import _kernels, simulate


def best_of(repeat, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=200_000)
    parser.add_argument("--m", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    if "c" not in backends:
        print("note: compiled kernels unavailable; showing python only")

    rng = np.random.Generator(np.random.Philox(key=7))
    P = rng.random((args.reps, args.m))
    thresholds = np.full(args.m, 0.05)
    plan = HierarchyPlan.chain([f"e{i}" for i in range(args.m)])
    offsets = np.arange(args.m + 1, dtype=np.int64)
    thr = np.full(args.m, 0.05)
    gates = np.zeros(args.m, dtype=np.uint8)

    cases = [
        ("threshold", lambda mod: mod.count_threshold(P, thresholds)),
        ("holm", lambda mod: mod.count_holm(P, 0.05)),
        ("hochberg", lambda mod: mod.count_hochberg(P, 0.05)),
        ("fixed-sequence", lambda mod: mod.count_fixed_sequence(P, offsets, thr, gates)),
    ]

    print(f"\nkernel timings (best of {args.repeat}; {args.reps} x {args.m} p-matrix)")
    header = f"{'kernel':<16}" + "".join(f"{b:>12}" for b in backends)
    print(header + ("" if len(backends) < 2 else f"{'speedup':>10}"))
    for name, call in cases:
        times = {}
        outputs = {}
        for backend in backends:
            mod = _kernels.get(backend)
            times[backend], outputs[backend] = best_of(args.repeat, call, mod)
        row = f"{name:<16}" + "".join(f"{times[b] * 1e3:>10.1f}ms" for b in backends)
        if len(backends) == 2:
            pe_c, _, any_c, all_c = outputs["c"]
            pe_p, _, any_p, all_p = outputs["python"]
            assert np.array_equal(pe_c, pe_p) and (any_c, all_c) == (any_p, all_p), \
                f"backend mismatch in {name}"
            row += f"{times['python'] / times['c']:>9.1f}x"
        print(row)

    config = SimulationConfig(
        m=args.m, effects=(0.0,) * args.m, corr=exchangeable_corr(args.m, 0.3),
        n_per_arm=100, alpha=0.05, reps=args.reps, seed=7)
    print(f"\nend-to-end estimate_fwer (fixed-sequence, rho=0.3, {args.reps} reps)")
    previous = _kernels.active_backend()
    try:
        reports = {}
        for backend in backends:
            _kernels.set_backend(backend)
            t, reports[backend] = best_of(
                args.repeat, simulate.estimate_fwer,
                Procedure.fixed_sequence(plan), config)
            print(f"  {backend:<8} {t * 1e3:>8.1f}ms")
        if len(backends) == 2:
            assert reports["c"] == reports["python"], "backend reports differ"
            print("  reports bitwise identical across backends")
    finally:
        _kernels.set_backend(previous)


if __name__ == "__main__":
    main()
