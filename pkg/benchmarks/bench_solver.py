"""Compare the numba kernels with the pure-Python fallback.

Each backend runs in its own interpreter (the backend is chosen at import
time by TBNSAT_DISABLE_JIT).  Workloads: random 3-SAT near the threshold,
and stable-polymer-count queries on corpus instances.

    python benchmarks/bench_solver.py [--repeat 3] [--skip-pure]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

WORKER = r"""
import json, random, sys, time
from tbnsat import backend_name, read_tbn
from tbnsat.queries import stable_polymer_count
from tbnsat.sat import solve

corpus, repeat, tree_n = sys.argv[1], int(sys.argv[2]), int(sys.argv[3])

def timed(fn):
    fn()  # warm-up: JIT compile or cache load
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best

def random_3sat():
    rng = random.Random(0)
    for _ in range(20):
        nv = 120
        cl = [[rng.choice((-1, 1)) * rng.randint(1, nv) for _ in range(3)] for _ in range(int(4.26 * nv))]
        solve(cl)

formula = read_tbn(corpus + "/formula_all_inputs.tbn")
from tbnsat.reductions import tree_tbn
tree = tree_tbn(tree_n)
out = {
    "backend": backend_name(),
    "random_3sat_x20": timed(random_3sat),
    "formula_stable_count": timed(lambda: stable_polymer_count(formula)),
    f"tree{tree_n}_stable_count": timed(lambda: stable_polymer_count(tree)),
}
print(json.dumps(out))
"""


def run(disable_jit: bool, repeat: int, tree_n: int) -> dict:
    env = dict(os.environ)
    if disable_jit:
        env["TBNSAT_DISABLE_JIT"] = "1"
    else:
        env.pop("TBNSAT_DISABLE_JIT", None)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(ROOT / "corpus"), str(repeat), str(tree_n)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--tree", type=int, default=5, help="tree family size for the query workload")
    ap.add_argument("--skip-pure", action="store_true")
    args = ap.parse_args(argv)

    rows = [run(False, args.repeat, args.tree)]
    if not args.skip_pure:
        rows.append(run(True, args.repeat, args.tree))
    keys = [k for k in rows[0] if k != "backend"]
    print(f"{'workload':<26}" + "".join(f"{r['backend']:>12}" for r in rows) + ("     speedup" if len(rows) == 2 else ""))
    for k in keys:
        line = f"{k:<26}" + "".join(f"{r[k]:>11.3f}s" for r in rows)
        if len(rows) == 2:
            line += f"{rows[1][k] / rows[0][k]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
