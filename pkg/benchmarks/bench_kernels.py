#!/usr/bin/env python3
"""Compare the compiled Newton kernel against the NumPy fallback.

Times three workloads on the packaged 4-bus study case: single power-flow
solves from a flat start, one full loadability search, and the whole
default error sweep.  Run after an editable install:

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import corridormon.powerflow as pf
from corridormon.harness import default_network, default_splits, default_topology, error_sweep


def time_solves(net, repeat):
    start = time.perf_counter()
    for _ in range(repeat):
        pf.solve_power_flow(net)
    return (time.perf_counter() - start) / repeat


def time_loadability(net, repeat):
    start = time.perf_counter()
    for _ in range(repeat):
        pf.max_loadability(net, {"l1": 0.5, "l2": 0.5})
    return (time.perf_counter() - start) / repeat


def time_sweep(net, topo, splits):
    start = time.perf_counter()
    error_sweep(net, topo, splits)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=200,
                        help="repetitions for the short workloads")
    args = parser.parse_args()

    net, topo = default_network(), default_topology()
    splits = default_splits(net, topo)
    backends = pf.available_backends()
    if len(backends) < 2:
        print(f"only the {backends[0]!r} kernel is available; timing it alone")

    results = {}
    for name in backends:
        pf.set_backend(name)
        results[name] = (
            time_solves(net, args.repeat),
            time_loadability(net, max(1, args.repeat // 10)),
            time_sweep(net, topo, splits),
        )
        print(
            f"{name:>9}:  solve {results[name][0] * 1e6:8.1f} us   "
            f"loadability {results[name][1] * 1e3:8.2f} ms   "
            f"sweep {results[name][2] * 1e3:8.1f} ms"
        )

    if len(backends) == 2:
        a, b = (results[n] for n in backends)
        ratios = [y / x for x, y in zip(a, b)]
        print(
            f"{backends[1]}/{backends[0]} time ratios:  "
            f"solve {ratios[0]:.1f}x   loadability {ratios[1]:.1f}x   "
            f"sweep {ratios[2]:.1f}x"
        )


if __name__ == "__main__":
    main()
