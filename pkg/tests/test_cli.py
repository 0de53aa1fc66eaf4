import json
import subprocess
import sys

import jsonschema
import pytest

from conftest import CORPUS
from tbnsat.cli import main
from tbnsat.parser import parse_tbn, result_schema


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name, monomer, count, free", [
    ("and_gate1.tbn", "out", 5, True),
    ("and_gate1_minus_ab.tbn", "out", 4, False),
    ("and_gate2_minus_cd.tbn", "out", 4, False),
    ("formula_all_inputs.tbn", "e e e", 18, True),
    ("formula_without_xz.tbn", "out", 16, False),
    ("sd_gate_both.tbn", "q y1 y2", 6, True),
    ("sd_gate_input_a.tbn", "b1 x1 x2", 5, False),
])
def test_stably_free_golden(capsys, name, monomer, count, free):
    code, out, err = run(capsys, "stably-free", CORPUS / name, "--monomer", monomer, "--json")
    d = json.loads(out)
    jsonschema.validate(d, result_schema())
    assert (d["stable_polymer_count"], d["monomer_free"]) == (count, free)
    assert code == (0 if free else 1)


def test_solve_text_and_json(capsys):
    code, out, _ = run(capsys, "solve", CORPUS / "and_gate1.tbn")
    assert code == 0 and "stable polymer count: 5" in out
    code, out, _ = run(capsys, "solve", CORPUS / "and_gate1.tbn", "--json")
    assert json.loads(out)["stable_polymer_count"] == 5


def test_solve_batch(capsys):
    code, out, _ = run(capsys, "solve", CORPUS / "t_ex.tbn", "--batch", "--json")
    assert json.loads(out)["stable_polymer_count"] == 3


def test_solve_empty_file(capsys, tmp_path):
    p = tmp_path / "empty.tbn"
    p.write_text("")
    code, out, _ = run(capsys, "solve", p)
    assert code == 0 and "stable polymer count: 0" in out


@pytest.mark.parametrize("k, code", [(3, 0), (4, 1)])
def test_min_polymers(capsys, k, code):
    got, out, _ = run(capsys, "solve", CORPUS / "t_ex.tbn", "--min-polymers", k, "--json")
    d = json.loads(out)
    assert got == code and d["found"] is (code == 0)


def test_parse_error_exit_code(capsys, tmp_path):
    p = tmp_path / "bad.tbn"
    p.write_text("a b\n0x c\n")
    code, out, err = run(capsys, "solve", p)
    assert code == 2 and "line 2" in err and out == ""


def test_missing_file(capsys):
    code, _, err = run(capsys, "solve", "/nonexistent.tbn")
    assert code == 2 and "cannot read" in err


def test_unknown_monomer(capsys):
    code, _, err = run(capsys, "stably-free", CORPUS / "t_ex.tbn", "-m", "zzz")
    assert code == 2


def test_budget_exhaustion_exit_code(capsys, tmp_path):
    p = tmp_path / "tree.tbn"
    assert main(["gen", "tree", "-n", "6", "--order", "shuffled", "--seed", "3", "-o", str(p)]) == 0
    code, _, err = run(capsys, "solve", p, "--conflict-budget", "10")
    assert code == 3 and "unknown" in err


def test_encode_and_round_trip(capsys, tmp_path):
    out3 = tmp_path / "k3.cnf"
    assert main(["encode", str(CORPUS / "t_ex.tbn"), "-k", "3", "-o", str(out3)]) == 0
    text = out3.read_text()
    assert text.count("PAIR") == 4 and "p cnf 20 " in text
    code, out, _ = run(capsys, "solve", out3, "--from-dimacs", "--json")
    assert code == 0 and json.loads(out)["verdict"] == "SAT"
    out4 = tmp_path / "k4.cnf"
    main(["encode", str(CORPUS / "t_ex.tbn"), "-k", "4", "-o", str(out4)])
    code, out, _ = run(capsys, "solve", out4, "--from-dimacs")
    assert code == 1 and "UNSATISFIABLE" in out


def test_encode_rejects_large_k(capsys):
    code, _, err = run(capsys, "encode", CORPUS / "t_ex.tbn", "-k", "5")
    assert code == 2 and "k must satisfy" in err


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", CORPUS / "t_ex.tbn")
    assert out.strip() == "8 total, 3 saturated, 1 stable, S=3"
    code, out, _ = run(capsys, "enumerate", CORPUS / "t_ex.tbn", "--dump", "--limit", "2", "--json")
    assert json.loads(out) == {"total": 8, "saturated": 3, "stable": 1, "S": 3}


def test_enumerate_tree_and_refusal(capsys, tmp_path):
    p = tmp_path / "t.tbn"
    main(["gen", "tree", "-n", "3", "-o", str(p)])
    code, out, _ = run(capsys, "enumerate", p, "--filter", "saturated")
    assert int(out.split()[0]) >= 12
    main(["gen", "tree", "-n", "6", "-o", str(p)])
    code, out, err = run(capsys, "enumerate", p)
    assert code == 4 and "refus" in err


def test_gen_families(capsys):
    code, out, _ = run(capsys, "gen", "exact-cover", "--sets", "a,b;b,c;c", "-j", "3")
    assert parse_tbn(out).n == 9
    code, out, _ = run(capsys, "gen", "graph-mis", "--edges", "a-b,b-c")
    assert parse_tbn(out).n == 4
    code, out, _ = run(capsys, "gen", "vc-transform", "--edges", "u-v", "--target", "v")
    assert parse_tbn(out).n == 6 and "query monomer: v_hub" in out
    code, out, _ = run(capsys, "gen", "tree", "-n", "7")
    assert parse_tbn(out).n == 127


def test_checked_in_tree_matches_generator(capsys):
    _, out, _ = run(capsys, "gen", "tree", "-n", "7")
    assert parse_tbn(out) == parse_tbn((CORPUS / "tree7.tbn").read_text())


def test_external_solver_flag(capsys):
    fake = CORPUS.parent / "tests" / "fake_solver.py"
    pytest.importorskip("pycosat")
    code, out, _ = run(capsys, "stably-free", CORPUS / "and_gate1.tbn", "-m", "out", "--json",
                       "--solver", f"{sys.executable} {fake} pycosat {{file}}")
    d = json.loads(out)
    assert (d["stable_polymer_count"], d["monomer_free"]) == (5, True)


def test_solver_template_validation(capsys):
    code, _, err = run(capsys, "solve", CORPUS / "t_ex.tbn", "--solver", "kissat")
    assert code == 2 and "{file}" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tbnsat.cli", "solve", str(CORPUS / "t_ex.tbn"), "--json"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["stable_polymer_count"] == 3
