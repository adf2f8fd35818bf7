"""Compare the compiled and numpy field kernels on the same jump sets.

    python3 benchmarks/bench_field.py [--repeats 3]

Prints seconds per evaluation for each backend and checks that both return
identical bits.
"""

import argparse
import time

import numpy as np

from mstou import CompoundPoissonSeed, GammaJumps, GammaRate, GClassAmbit, LinearG, MstouModel
from mstou.kernels import backends
from mstou.simulate import Grid, SimulationDomain, draw_jumps, evaluate_field

CASES = [
    ("d=1 [0,50]^2", 1, 50.0),
    ("d=1 [0,100]^2", 1, 100.0),
    ("d=2 [0,10]^3", 2, 10.0),
]


def run(repeats: int):
    found = backends()
    print(f"{'case':<16}{'jumps':>8}{'nodes':>9}" + "".join(f"{name:>10}" for name in found) + "  identical")
    for label, d, size in CASES:
        model = MstouModel(CompoundPoissonSeed(0.2, GammaJumps(3.0, 1.0)), GammaRate(3.0 + d, 1.0), GClassAmbit(d, LinearG(1.0)))
        domain = SimulationDomain.square(d, 0.0, size, x_pad=10.0 if d > 1 else 40.0, t_pad=10.0 if d > 1 else 40.0)
        grid = Grid.from_domain(domain, 0.5)
        jumps = draw_jumps(model, domain, 2024)
        times, values = {}, {}
        for name, fn in found.items():
            best = np.inf
            for _ in range(repeats):
                t0 = time.perf_counter()
                values[name] = evaluate_field(jumps, model, grid, backend=fn).values
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        same = all(np.array_equal(v, values["python"]) for v in values.values())
        nodes = int(np.prod(grid.shape))
        print(f"{label:<16}{len(jumps):>8}{nodes:>9}" + "".join(f"{times[n]:>10.3f}" for n in found) + f"  {same}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3)
    run(parser.parse_args().repeats)
