"""Compare the compiled and numpy Newton kernels on the same random starts.

    python benchmarks/bench_newton.py [--starts 2000] [--repeat 3]

For each configuration both backends run identical start batches; the table
reports best-of-repeat wall time, the speedup, the number of converged starts
and the largest converged feasible delta, which must agree.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from choco.configuration import parse_shorthand
from choco.kernels import CONVERGED, available_backends
from choco.solver import SolverSettings, sample_starts
from choco.system import build_system

CONFIGS = ["[1],[],[]", "[2],[1],[]", "[3],[1],[1]", "[3,1],[2],[1]", "[3,2],[2,1],[1]",
           "[4,2,2,1],[3,2],[2,1,1]"]


def best_feasible(X, status):
    ok = (status == CONVERGED) & (X[:, 0] > 0) & np.all(X[:, 1:-1] >= -1e-9, axis=1)
    return float(X[ok, 0].max()) if ok.any() else float("nan")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the numpy fallback is available")
    names = [b for b in ("compiled", "python") if b in backends]
    print(f"{'config':<26}" + "".join(f"{n + ' s':>12}" for n in names)
          + f"{'speedup':>9}{'conv':>7}{'delta':>12}")
    settings = SolverSettings()
    for label in CONFIGS:
        sys = build_system(parse_shorthand(label).template())
        cs = sys.compiled()
        X0 = sample_starts(sys.unknowns, args.starts, settings, np.random.default_rng(0))
        times, results = {}, {}
        for n in names:
            mod = backends[n]
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                X, _, _, st = mod.newton_batch(cs, X0, 100, 1e-10)
                best = min(best, time.perf_counter() - t0)
            times[n], results[n] = best, (int((st == CONVERGED).sum()), best_feasible(X, st))
        speed = times["python"] / times["compiled"] if len(names) == 2 else float("nan")
        conv, delta = results[names[0]]
        deltas = {round(r[1], 9) for r in results.values() if r[1] == r[1]}
        flag = "" if len(deltas) <= 1 else "  MISMATCH"
        print(f"{label:<26}" + "".join(f"{times[n]:>12.3f}" for n in names)
              + f"{speed:>9.1f}{conv:>7}{delta:>12.7f}{flag}")


if __name__ == "__main__":
    main()
