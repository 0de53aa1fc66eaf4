import json

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tbnsat.model import Monomer, SiteType, Tbn
from tbnsat.parser import (
    TbnParseError,
    emit_result_json,
    parse_document,
    parse_site_ref,
    parse_tbn,
    result_schema,
    serialize_tbn,
)
from tbnsat.queries import stable_polymer_count, stably_free


def test_running_example_parses(t_ex):
    assert t_ex.n == 4
    assert [len(m.sites) for m in t_ex.monomers] == [1, 1, 2, 4]


def test_counts_labels_and_comments():
    doc = parse_document("# header\n3x in_x: x x x  # trailing\n\nout: e*\n")
    t = doc.tbn
    assert t.n == 4
    assert [m.label for m in t.monomers] == ["in_x"] * 3 + ["out"]
    assert doc.lines == (2, 2, 2, 4)


def test_empty_file_is_empty_tbn():
    assert parse_tbn("").n == 0
    assert parse_tbn("# nothing\n\n").n == 0


@pytest.mark.parametrize("text, line", [
    ("a\n0x b\n", 2),
    ("-2x a\n", 1),
    ("lab:\n", 1),
    ("a\n*\n", 2),
    ("a b**\n", 1),
    ("x: a\nx: b\n", 2),
    ("a\nbad label: a\n", 2),
    ("a $b\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(TbnParseError) as exc:
        parse_tbn(text)
    assert exc.value.line == line


site_st = st.builds(SiteType, st.sampled_from(["a", "b", "c1", "d_x", "e.f"]), st.booleans())
monomer_st = st.lists(site_st, min_size=1, max_size=5).map(tuple)


@st.composite
def tbns(draw):
    ms = draw(st.lists(monomer_st, min_size=0, max_size=8))
    out = []
    for i, sites in enumerate(ms):
        label = draw(st.one_of(st.none(), st.just(f"m{i}")))
        reps = draw(st.integers(1, 3)) if label else 1
        out.extend(Monomer(sites, label) for _ in range(reps))
    return Tbn(out)


@settings(max_examples=200, deadline=None)
@given(tbns())
def test_serialize_round_trip(t):
    assert parse_tbn(serialize_tbn(t)) == t


def test_serialize_collapses_repeated_labels(corpus):
    text = serialize_tbn(corpus("formula_all_inputs.tbn"))
    assert "3x xy_gate:" in text


def test_site_ref():
    assert parse_site_ref("12.3") == (12, 3)


@pytest.mark.parametrize("name, monomer", [
    ("and_gate1.tbn", "out"),
    ("t_ex.tbn", 0),
])
def test_result_json_matches_schema(corpus, name, monomer):
    t = corpus(name)
    res = stably_free(t, t.find_monomer(monomer))
    d = json.loads(emit_result_json(t, res))
    jsonschema.validate(d, result_schema())
    assert d["stable_polymer_count"] == res.stable_polymer_count
    assert d["monomer_free"] is res.free_verdict
    assert len(d["polymers"]) == res.stable_polymer_count
    covered = sorted(x for g in d["polymers"] for x in g if isinstance(x, int))
    assert len(sum(d["polymers"], [])) == t.n
    assert all(0 <= i < t.n for i in covered)


def test_result_json_pairs_are_valid_site_refs(t_ex):
    count, conf = stable_polymer_count(t_ex)
    from tbnsat.queries import QueryResult
    d = json.loads(emit_result_json(t_ex, QueryResult(count, None, conf)))
    assert d["monomer_free"] is None
    for a, b in d["pairs"]:
        ma, sa = parse_site_ref(a)
        mb, sb = parse_site_ref(b)
        assert t_ex.monomers[ma].sites[sa].complement() == t_ex.monomers[mb].sites[sb]
