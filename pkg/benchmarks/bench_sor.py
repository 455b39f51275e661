#!/usr/bin/env python3
"""Benchmark the SOR kernel backends on trap electrostatics problems.

Runs a fixed number of red-black passes of each available backend on the
default trap geometry at several grid resolutions, reports sweep throughput,
and verifies that the backends produce identical iterates.

    python benchmarks/bench_sor.py [--passes N] [--fine]

--fine adds the production-resolution grid (129 transverse nodes), which
takes a few minutes on the pure-python backend.
"""
import argparse
import sys
import time

import numpy as np

from berrytrap import kernels
from berrytrap.trap import default_trap
from berrytrap.trap.solver import laplace_solve, rasterize


def bench_passes(kern, values, mask, omega, n_passes):
    u = values.copy()
    start = time.perf_counter()
    for _ in range(n_passes):
        kern.sor_pass(u, mask, omega)
    elapsed = time.perf_counter() - start
    return u, elapsed


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--passes", type=int, default=100)
    parser.add_argument("--fine", action="store_true",
                        help="include the 129-node production grid")
    args = parser.parse_args(argv)

    model = default_trap()
    spacings = [0.08e-3, 0.0625e-3]
    if args.fine:
        spacings.append(2 * model.box[0] / 128)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}   passes per case: {args.passes}")
    print(f"{'grid':>14} {'cells':>10} " +
          " ".join(f"{b + ' [s]':>12}" for b in backends) + "   max|diff|")

    for h in spacings:
        origin, values, mask = rasterize(model, 0.0, h)
        omega = 1.9
        results, times = [], []
        for name in backends:
            u, dt = bench_passes(kernels.get_backend(name), values, mask,
                                 omega, args.passes)
            results.append(u)
            times.append(dt)
        diff = max(float(np.abs(results[0] - r).max()) for r in results[1:]) \
            if len(results) > 1 else 0.0
        shape = "x".join(str(s) for s in values.shape)
        print(f"{shape:>14} {values.size:>10} " +
              " ".join(f"{t:>12.3f}" for t in times) + f"   {diff:.3e}")

    # one full converged solve per backend for end-to-end comparison
    print("\nfull solve to tol=1e-8 (h = 0.0625 mm):")
    for name in backends:
        start = time.perf_counter()
        grid = laplace_solve(model, 0.0, 0.0625e-3, tol=1e-8, backend=name)
        print(f"  {name:>8}: {time.perf_counter() - start:7.2f} s "
              f"({grid.iterations} iterations, residual {grid.residual:.2e})")


if __name__ == "__main__":
    sys.exit(main())
