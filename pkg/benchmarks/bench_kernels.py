"""Time the compiled and pure-Python enumeration kernels on the same inputs.

Usage: python benchmarks/bench_kernels.py [--repeat R] [--sizes 10,14,18]
"""

import argparse
import timeit

from vcspland import gen, kernels
from vcspland.graph import build_fitness_graph, longest_improving_path, sign_depends


def workloads(n):
    inst = gen.random_instance(n, "random", seed=n, density=0.4)
    return {
        "fitness_table": lambda: kernels.fitness_table(inst),
        "graph+longest_path": lambda: longest_improving_path(build_fitness_graph(inst)),
        "sign_depends": lambda: sign_depends(inst, 1, 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", default="10,14,18")
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'n':>3} {'kernel':<20}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for n in (int(v) for v in args.sizes.split(",")):
        for name, fn in workloads(n).items():
            times = {}
            for b in backends:
                with kernels.backend(b):
                    fn()  # warm up
                    times[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{n:>3} {name:<20}" + "".join(f"{times[b]:>11.4f}s" for b in backends) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
