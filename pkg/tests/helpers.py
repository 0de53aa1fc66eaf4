"""Shared instance generators for the test suite."""
from __future__ import annotations

import random

from tbnsat.model import Monomer, SiteType, Tbn

NAMES = "abcd"


def random_tbn(rng: random.Random, max_monomers: int = 7, max_sites: int = 12, max_types: int = 4) -> Tbn:
    """Random TBN with at most the given numbers of monomers, site instances and site names."""
    n = rng.randint(1, max_monomers)
    total = rng.randint(n, max(n, max_sites))
    names = NAMES[: rng.randint(1, max_types)]
    sizes = [1] * n
    for _ in range(total - n):
        sizes[rng.randrange(n)] += 1
    ms = []
    for size in sizes:
        ms.append(Monomer(tuple(SiteType(rng.choice(names), rng.random() < 0.5) for _ in range(size))))
    return Tbn(ms)


def random_cnf(rng: random.Random, max_vars: int = 20, max_clauses: int | None = None):
    nv = rng.randint(1, max_vars)
    nc = rng.randint(1, max_clauses or int(4.5 * nv) + 2)
    clauses = []
    for _ in range(nc):
        width = rng.choice((1, 2, 3, 3, 3, 4))
        clauses.append([rng.choice((-1, 1)) * rng.randint(1, nv) for _ in range(width)])
    return nv, clauses


def brute_force_sat(nv: int, clauses) -> bool:
    """Truth-table satisfiability, vectorized over all 2^nv assignments."""
    import numpy as np

    bits = np.arange(1 << nv, dtype=np.int64)
    alive = np.ones(1 << nv, dtype=bool)
    for c in clauses:
        sat = np.zeros_like(alive)
        for lit in c:
            val = (bits >> (abs(lit) - 1)) & 1
            sat |= val.astype(bool) if lit > 0 else ~val.astype(bool)
        alive &= sat
        if not alive.any():
            return False
    return bool(alive.any())


def counter_mismatches(n: int, k: int, banded: bool) -> int:
    """Rep assignments (out of 2^n) where the counter's satisfiability disagrees with popcount >= k.

    Each assignment is checked with the embedded solver and, when pycosat is
    installed, independently with pycosat.
    """
    from tbnsat.encoder import VarMap, counter_clauses
    from tbnsat.sat import CdclSolver

    vm = VarMap()
    reps = [vm.new_var("REP", i) for i in range(n)]
    clauses = counter_clauses(vm, reps, k, banded=banded)
    if not banded:
        clauses = clauses + [[vm.sum[(n, k)]]]
    s = CdclSolver(num_vars=vm.num_vars)
    s.add_clauses(clauses)
    try:
        import pycosat
    except ImportError:  # pragma: no cover
        pycosat = None
    bad = 0
    for bits in range(1 << n):
        assume = [r if bits >> i & 1 else -r for i, r in enumerate(reps)]
        want = bin(bits).count("1") >= k
        wrong = s.solve(assume).sat != want
        if pycosat is not None:
            wrong |= (pycosat.solve(clauses + [[a] for a in assume]) != "UNSAT") != want
        bad += wrong
    return bad
