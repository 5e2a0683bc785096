"""Compare the compiled and pure-Python kernel backends.

Generates pool-scale workloads, runs the latency simulation through both
backends, checks the outputs agree exactly, and reports wall times.

    python benchmarks/bench_kernels.py [--qubits 600] [--layers 600] [--runs 3]
"""
import argparse
import time

import numpy as np

import annulus._kernels as kernels
from annulus._kernels import pure
from annulus.circuit import SynthParams, generate, totals
from annulus.floorplan import auto_config, build
from annulus.placement import greedy_place
from annulus.scheduler import LatencyModel, simulate

try:
    from annulus._kernels import _fast
except ImportError:
    _fast = None


def run_backend(impl, circuit, placement, fp, model, runs):
    kernels.simulate_layers = impl.simulate_layers
    import annulus.scheduler as sched

    sched._kernels.simulate_layers = impl.simulate_layers
    best = float("inf")
    trace = None
    for _ in range(runs):
        start = time.perf_counter()
        trace = simulate(circuit, placement, fp, model)
        best = min(best, time.perf_counter() - start)
    return best, trace


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, default=600)
    parser.add_argument("--layers", type=int, default=600)
    parser.add_argument("--runs", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"workload: {args.qubits} qubits x {args.layers} layers, "
          f"high density, seed {args.seed}")
    circuit = generate(SynthParams(
        num_qubits=args.qubits, num_layers=args.layers,
        density_class="high", seed=args.seed,
    ))
    n_t, s_max = totals(circuit)
    fp = build(auto_config(circuit.num_qubits, s_max))
    placement = greedy_place(circuit, fp)
    print(f"floorplan: n={fp.n}, rings={fp.ring_sizes}, N_T={n_t}")

    results = {}
    for mode in ("stateless", "promote_inward"):
        model = LatencyModel(movement_mode=mode)
        t_pure, trace_pure = run_backend(
            pure, circuit, placement, fp, model, args.runs
        )
        results[(mode, "pure")] = t_pure
        if _fast is not None:
            t_fast, trace_fast = run_backend(
                _fast, circuit, placement, fp, model, args.runs
            )
            results[(mode, "compiled")] = t_fast
            assert trace_fast == trace_pure, "backend outputs diverge"
        print(f"  [{mode}] t_total={trace_pure.t_total}t")

    print()
    print(f"{'mode':<16} {'backend':<10} {'best of ' + str(args.runs):>12}")
    for (mode, backend), seconds in sorted(results.items()):
        print(f"{mode:<16} {backend:<10} {seconds * 1e3:>10.2f} ms")
    if _fast is not None:
        for mode in ("stateless", "promote_inward"):
            speedup = results[(mode, "pure")] / results[(mode, "compiled")]
            print(f"speedup ({mode}): {speedup:.1f}x (outputs identical)")
    else:
        print("compiled backend not built; showing pure backend only")


if __name__ == "__main__":
    main()
