import os
import random
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from helpers import brute_force_sat, random_cnf
from tbnsat.sat import (
    CdclSolver,
    ExternalSolverError,
    SolverError,
    Verdict,
    check_model,
    parse_dimacs,
    solve,
    solve_external,
)
from tbnsat.sat.external import parse_competition_output

pycosat = pytest.importorskip("pycosat")

FAKE = Path(__file__).with_name("fake_solver.py")


def fake_cmd(mode):
    return f"{sys.executable} {FAKE} {mode} {{file}}"


def _dimacs(nv, clauses):
    return f"p cnf {nv} {len(clauses)}\n" + "".join(" ".join(map(str, c)) + " 0\n" for c in clauses)


def test_trivial_cases():
    assert solve([]).sat
    assert solve([[1], [-1]]).unsat
    assert solve([[1, -1]]).sat
    out = solve([[1], [-2], [2, 3]])
    assert out.value(1) and not out.value(2) and out.value(3)


@pytest.mark.parametrize("seed", range(6))
def test_brute_force_agreement(seed):
    rng = random.Random(seed)
    for _ in range(60):
        nv, clauses = random_cnf(rng, max_vars=12)
        out = solve(clauses)
        assert out.sat == brute_force_sat(nv, clauses)


def test_pigeonhole_unsat():
    # 6 pigeons, 5 holes
    p, h = 6, 5
    var = lambda i, j: i * h + j + 1
    clauses = [[var(i, j) for j in range(h)] for i in range(p)]
    for j in range(h):
        for a in range(p):
            for b in range(a + 1, p):
                clauses.append([-var(a, j), -var(b, j)])
    out = solve(clauses)
    assert out.unsat
    assert out.stats["conflicts"] > 0


def test_random_3sat_against_pycosat():
    rng = random.Random(3)
    for _ in range(15):
        nv = 80
        clauses = [[rng.choice((-1, 1)) * rng.randint(1, nv) for _ in range(3)] for _ in range(int(4.26 * nv))]
        assert solve(clauses).sat == (pycosat.solve(clauses) != "UNSAT")


def test_incremental_assumptions_match_fresh_solves():
    rng = random.Random(9)
    nv, clauses = 30, None
    clauses = [[rng.choice((-1, 1)) * rng.randint(1, nv) for _ in range(3)] for _ in range(110)]
    s = CdclSolver(num_vars=nv)
    s.add_clauses(clauses)
    for _ in range(40):
        assume = [rng.choice((-1, 1)) * v for v in rng.sample(range(1, nv + 1), 5)]
        got = s.solve(assume)
        want = pycosat.solve(clauses + [[a] for a in assume]) != "UNSAT"
        assert got.sat == want
        if got.sat:
            assert all(got.value(a) for a in assume)


def test_clauses_added_between_solves():
    s = CdclSolver()
    s.add_clauses([[1, 2], [-1, 2]])
    assert s.solve().sat
    s.add_clause([-2])
    assert s.solve().unsat


def test_seed_determinism():
    rng = random.Random(1)
    clauses = [[rng.choice((-1, 1)) * rng.randint(1, 40) for _ in range(3)] for _ in range(150)]
    a = solve(clauses, seed=5)
    b = solve(clauses, seed=5)
    assert a.verdict == b.verdict
    if a.sat:
        assert np.array_equal(a.model, b.model)


def test_conflict_budget_yields_unknown():
    p, h = 9, 8
    var = lambda i, j: i * h + j + 1
    clauses = [[var(i, j) for j in range(h)] for i in range(p)]
    clauses += [[-var(a, j), -var(b, j)] for j in range(h) for a in range(p) for b in range(a + 1, p)]
    assert solve(clauses, conflict_budget=50).verdict is Verdict.UNKNOWN


def test_check_model():
    flat = np.array([1, 2, -1], dtype=np.int64)
    offsets = np.array([0, 2, 3], dtype=np.int64)
    assert check_model(flat, offsets, np.array([False, False, True]))
    assert not check_model(flat, offsets, np.array([False, True, False]))


def test_parse_dimacs_tolerates_comments_and_line_breaks():
    nv, clauses = parse_dimacs("c hi\np cnf 3 2\n1 -2\n 0 3 0\n")
    assert nv == 3 and clauses == [[1, -2], [3]]
    with pytest.raises(ValueError):
        parse_dimacs("p dnf 1 1\n1 0\n")


def test_competition_output_parsing():
    v, m = parse_competition_output("c x\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3)
    assert v is Verdict.SAT and m.tolist() == [False, True, False, True]
    with pytest.raises(ValueError):
        parse_competition_output("v 1 0\n", 1)


class TestExternal:
    def test_agrees_with_embedded(self):
        rng = random.Random(4)
        for _ in range(10):
            nv, clauses = random_cnf(rng, max_vars=15)
            out = solve_external(_dimacs(nv, clauses), fake_cmd("pycosat"))
            assert out.sat == solve(clauses).sat

    def test_bogus_model_is_rejected(self):
        with pytest.raises(SolverError):
            solve_external(_dimacs(2, [[1, 2]]), fake_cmd("bogus"))

    def test_exit_code_contradiction(self):
        with pytest.raises(ExternalSolverError):
            solve_external(_dimacs(1, [[1], [-1]]), fake_cmd("wrong-exit"))

    @pytest.mark.parametrize("mode", ["garbage", "crash"])
    def test_broken_solvers(self, mode):
        with pytest.raises(ExternalSolverError):
            solve_external(_dimacs(1, [[1]]), fake_cmd(mode))

    def test_missing_executable(self):
        with pytest.raises(ExternalSolverError):
            solve_external(_dimacs(1, [[1]]), "/nonexistent/solver {file}")

    def test_template_needs_placeholder(self):
        with pytest.raises(ValueError):
            solve_external(_dimacs(1, [[1]]), "kissat")


def test_pure_backend_agrees():
    # run a small agreement check in a fresh interpreter with the JIT disabled
    code = (
        "import random, sys; sys.path.insert(0, %r)\n"
        "from helpers import random_cnf, brute_force_sat\n"
        "from tbnsat import backend_name\n"
        "from tbnsat.sat import solve\n"
        "assert backend_name() == 'python', backend_name()\n"
        "rng = random.Random(2)\n"
        "for _ in range(40):\n"
        "    nv, cl = random_cnf(rng, max_vars=10)\n"
        "    assert solve(cl).sat == brute_force_sat(nv, cl)\n"
        "print('ok')\n" % str(Path(__file__).parent)
    )
    env = dict(os.environ, TBNSAT_DISABLE_JIT="1")
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "ok"
