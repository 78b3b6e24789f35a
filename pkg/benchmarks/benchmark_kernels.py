#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the mass-action right-hand side, one embedded RK step, and a full
adaptive trajectory integration on a representative random network, for both
backends available in crnbound._kernels.IMPLEMENTATIONS.

Run:  python benchmarks/benchmark_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from crnbound import _kernels
from crnbound.certifier import NetworkSpec, generate_random_network
from crnbound.dynamics import compile_system


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--rhs-calls", type=int, default=20_000)
    ap.add_argument("--horizon", type=float, default=50.0)
    args = ap.parse_args()

    net, kin = generate_random_network(
        NetworkSpec(n_species=4, num_complexes=5, max_coeff=3, extra_edges=2, seed=7)
    )
    sys = compile_system(net, kin, horizon=args.horizon)
    kargs = sys.kernel_args()
    x0 = np.full(net.n_species, 3.0)

    print(f"active backend: {_kernels.kernel_backend()}")
    print(f"network: {net.n_species} species, {net.n_reactions} reactions")
    header = f"{'kernel':<18}" + "".join(f"{name:>14}" for name in _kernels.IMPLEMENTATIONS)
    print(header)
    print("-" * len(header))

    rows = []

    def bench(label, make_call):
        cells = [f"{label:<18}"]
        results = {}
        for name, impl in _kernels.IMPLEMENTATIONS.items():
            call = make_call(impl)
            call()  # warm up (jit compile)
            results[name] = _time(call, args.repeats)
            cells.append(f"{results[name] * 1e3:>11.2f} ms")
        rows.append((label, results))
        print("".join(cells))

    n_calls = args.rhs_calls

    def make_rhs(impl):
        rhs = impl["rhs"]

        def call():
            for _ in range(n_calls):
                rhs(0.5, x0, *kargs)

        return call

    def make_step(impl):
        step = impl["rk_step"]

        def call():
            for _ in range(n_calls // 4):
                step(0.5, 1e-3, x0, *kargs)

        return call

    def make_integrate(impl):
        loop = impl["integrate_loop"]

        def call():
            status, ts, xs, fs, na, nr = loop(
                x0, args.horizon, 1e-8, 1e-10, 1e-6, 2_000_000, *kargs
            )
            assert status == _kernels.STATUS_OK

        return call

    bench(f"rhs x{n_calls}", make_rhs)
    bench(f"rk_step x{n_calls // 4}", make_step)
    bench(f"integrate t={args.horizon:g}", make_integrate)

    if "numba" in _kernels.IMPLEMENTATIONS:
        print()
        for label, res in rows:
            speedup = res["numpy"] / res["numba"]
            print(f"{label:<24} numba speedup: {speedup:6.1f}x")


if __name__ == "__main__":
    main()
