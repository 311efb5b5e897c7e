"""Compare the compiled synthesis kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times both kernels on the grid case study and on a few larger random
instances, checks that they return identical arrays, and prints a table.
"""

import argparse
import timeit

from obsmode import kernels
from obsmode.belief import build_belief
from obsmode.casestudy import GRID_FORMULA, grid_casestudy
from obsmode.oracle import random_instance
from obsmode.product import build_product
from obsmode.scltl import compile_to_dfa, parse_formula
from obsmode.synthesis import iteration_cap, to_csr


def workloads():
    grid = grid_casestudy()
    dfa = compile_to_dfa(parse_formula(GRID_FORMULA, grid.atomic_props), grid.atomic_props)
    yield "grid", build_belief(build_product(grid, dfa))
    found = 0
    for seed in range(1000):
        model, f = random_instance(seed, n_states=9, n_actions=3, n_modes=3)
        bp = build_belief(build_product(model, compile_to_dfa(f, model.atomic_props)))
        if len(bp.beliefs) >= 300:
            yield f"random seed {seed}", bp
            found += 1
            if found == 3:
                return


def time_call(fn, repeat):
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if "compiled" not in kernels.BACKENDS:
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    py, c = kernels.get("python"), kernels.get("compiled")

    print(f"{'workload':<20} {'beliefs':>8} {'kernel':<10} {'python ms':>10} "
          f"{'compiled ms':>12} {'speedup':>8}")
    for name, bp in workloads():
        arrays, _, _ = to_csr(bp)
        cap = iteration_cap(bp)
        calls = {
            "unbounded": lambda impl: impl.unbounded(*arrays, bp.init),
            "bounded": lambda impl: impl.bounded(*arrays, cap, cap),
        }
        for kernel, call in calls.items():
            assert [list(x) for x in call(py)] == [list(x) for x in call(c)], (name, kernel)
            t_py = time_call(lambda: call(py), args.repeat)
            t_c = time_call(lambda: call(c), args.repeat)
            print(f"{name:<20} {len(bp.beliefs):>8} {kernel:<10} {t_py * 1e3:>10.2f} "
                  f"{t_c * 1e3:>12.3f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
