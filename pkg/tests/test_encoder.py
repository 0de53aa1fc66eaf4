import random
from math import comb

import numpy as np
import pytest

from helpers import counter_mismatches, random_tbn
from tbnsat import oracle
from tbnsat.encoder import (
    EncodingError,
    VarMap,
    counter_clauses,
    decode_model,
    encode_polymer_count,
    encode_query,
    encode_saturation,
    expected_clause_counts,
    pair_legend,
    resolve_order,
    to_dimacs,
)
from tbnsat.model import Tbn, TbnError, polymers
from tbnsat.sat import CdclSolver, parse_dimacs, solve


def _kinds(vm):
    out = {}
    for name in vm.names[1:]:
        out[name[0]] = out.get(name[0], 0) + 1
    return out


def test_running_example_variable_accounting(t_ex):
    enc = encode_query(t_ex, 3)
    kinds = _kinds(enc.vm)
    assert kinds["PAIR"] == 4
    assert kinds["BIND"] == comb(4, 2)
    assert kinds["REP"] == 4
    # banded grid for n=4, k=3: rows hold 1, 2, 2, 1 cells
    assert kinds["SUM"] == 6
    assert enc.cnf().num_vars == 20


@pytest.mark.parametrize("name", ["t_ex.tbn", "and_gate1.tbn", "sd_gate_both.tbn"])
def test_clause_counts_match_closed_form(corpus, name):
    t = corpus(name)
    enc = encode_query(t, 1)
    cnf = enc.cnf()
    for tag, want in expected_clause_counts(t).items():
        assert cnf.group_size(tag) == want, tag


def test_transitivity_clauses_are_exact_for_four_monomers():
    t = Tbn.from_lists([["a"], ["a*"], ["b"], ["b*"]])
    enc = encode_polymer_count(t, 1)
    cls = {tuple(sorted(c)) for c in enc.cnf().group_clauses("transitivity")}
    assert len(cls) == 3 * comb(4, 3)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("banded", [True, False])
def test_counter_is_exact(n, banded):
    for k in range(1, n + 1):
        assert counter_mismatches(n, k, banded) == 0


def test_counter_has_base_clause():
    vm = VarMap()
    reps = [vm.new_var("REP", i) for i in range(3)]
    clauses = counter_clauses(vm, reps, 2, banded=False)
    # Sum(1,1) implies Rep(m1): without it a lone Sum(1,1) could be set freely
    assert [-vm.sum[(1, 1)], reps[0]] in clauses


def test_counter_rejects_bad_bound():
    vm = VarMap()
    reps = [vm.new_var("REP", i) for i in range(3)]
    with pytest.raises(ValueError):
        counter_clauses(vm, reps, 4)


def test_k_above_n_is_trivially_unsat(t_ex):
    enc = encode_query(t_ex, 5)
    assert enc.trivially_unsat
    assert solve(enc.cnf()).unsat


def test_dimacs_round_trip_and_legend(t_ex):
    enc = encode_query(t_ex, 3)
    cnf = enc.cnf()
    text = to_dimacs(cnf, enc.vm, t_ex)
    nv, clauses = parse_dimacs(text)
    assert nv == cnf.num_vars and clauses == cnf.clauses
    legend = pair_legend(text)
    assert len(legend) == 4
    assert legend[1] == ("0.0", "3.2")


def test_empty_instance_dimacs():
    enc = encode_saturation(Tbn())
    assert to_dimacs(enc.cnf()) == "p cnf 0 0\n"


def test_decode_rejects_unsaturated(t_ex):
    enc = encode_query(t_ex, 1)
    model = np.zeros(enc.cnf().num_vars + 1, dtype=bool)
    with pytest.raises(EncodingError):
        decode_model(enc, model)


def test_orders():
    t = Tbn.from_lists([["a"], ["a*", "b", "c"], ["b*"]])
    assert resolve_order(t, None) == [0, 1, 2]
    assert resolve_order(t, "reverse") == [2, 1, 0]
    assert resolve_order(t, "most-sites-first") == [1, 0, 2]
    with pytest.raises(TbnError):
        resolve_order(t, [0, 0, 1])


@pytest.mark.parametrize("amo", ["pairwise", "sequential"])
@pytest.mark.parametrize("order", [None, "reverse", "most-sites-first"])
def test_encoding_variants_agree_with_oracle(amo, order):
    rng = random.Random(11)
    for _ in range(40):
        t = random_tbn(rng, max_monomers=6, max_sites=10)
        best, _ = oracle.oracle_stable_count(t)
        for k in (best, best + 1):
            cnf = encode_query(t, k, order=order, amo=amo)
            out = solve(cnf.cnf())
            assert out.sat == (k <= t.n and k <= best)
            if out.sat:
                assert len(polymers(t, decode_model(cnf, out.model))) >= k


def test_free_constraint_blocks_inter_monomer_pairs():
    t = Tbn.from_lists([["a"], ["a*"], ["a"]])
    enc = encode_query(t, 1, free=0)
    s = CdclSolver()
    s.add_clauses(enc.cnf().clauses)
    out = s.solve()
    assert out.sat
    conf = decode_model(enc, out.model)
    assert all(0 not in (t.site_monomer[a], t.site_monomer[b]) for a, b in conf.pairs)
