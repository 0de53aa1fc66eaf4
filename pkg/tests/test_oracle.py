import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_tbn
from tbnsat import oracle
from tbnsat.model import Tbn, is_saturated, is_valid_configuration
from tbnsat.reductions import exact_cover_to_tbn, parse_sets, tree_tbn


def test_running_example_counts(t_ex):
    rep = oracle.enumeration_report(t_ex)
    assert (rep.total, rep.saturated, rep.stable, rep.max_polymers) == (8, 3, 1, 3)
    assert oracle.oracle_stable_count(t_ex) == (3, 1)
    assert oracle.count_saturated(t_ex) == 3


def test_running_example_singletons_stably_free(t_ex):
    assert oracle.oracle_stably_free(t_ex, 0)
    assert oracle.oracle_stably_free(t_ex, 1)


@pytest.mark.parametrize("t, total, saturated", [
    (Tbn(), 1, 1),
    (Tbn.from_lists([["a"]]), 1, 1),
    (Tbn.from_lists([["a"], ["a*"]]), 2, 1),
    (Tbn.from_lists([["a"], ["a"], ["a*"]]), 3, 2),
])
def test_small_counts(t, total, saturated):
    assert sum(1 for _ in oracle.enumerate_configurations(t)) == total
    assert oracle.count_saturated(t) == saturated


def test_exact_cover_example():
    assert oracle.oracle_stable_count(exact_cover_to_tbn(parse_sets("a,b;b,c;c")))[0] == 2


def test_tree_counts():
    t3 = tree_tbn(3)
    assert oracle.count_saturated(t3) == 48
    for n in (1, 2, 3):
        assert oracle.oracle_stable_count(tree_tbn(n))[0] == 1


def test_bound_refusal_names_estimate():
    with pytest.raises(oracle.OracleBoundExceeded) as exc:
        next(oracle.enumerate_configurations(tree_tbn(4), bound=1000))
    assert exc.value.estimate > 1000
    assert "refusing" in str(exc.value)


def test_unknown_filter():
    with pytest.raises(ValueError):
        next(oracle.enumerate_configurations(Tbn(), "stable"))


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_enumeration_is_exhaustive_and_distinct(seed):
    t = random_tbn(random.Random(seed), max_monomers=5, max_sites=8)
    allc = list(oracle.enumerate_configurations(t, "all"))
    sat = list(oracle.enumerate_configurations(t, "saturated"))
    assert len(set(allc)) == len(allc) == oracle.estimate_count(t, "all")
    assert len(set(sat)) == len(sat) == oracle.estimate_count(t, "saturated")
    assert all(is_valid_configuration(t, c) for c in allc)
    assert {c for c in allc if is_saturated(t, c)} == set(sat)
