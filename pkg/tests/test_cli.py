"""End-to-end CLI checks: verb wiring, verdict lines, exit codes, JSON shape.

Everything drives ``main(argv)`` in-process; one test execs the module to
confirm the installed surface agrees.
"""

import json
import subprocess
import sys

import pytest

from avasskit.cli import main
from avasskit.frontend import parse_formula, parse_machine, serialize_machine
from avasskit.presburger import evaluate
from avasskit.generators import build_pcp_machine, machine_m1, machine_m2, PCPInstance
from avasskit.machine import Configuration
from avasskit.prestar import compute_pre_star
from avasskit.semiset import from_json_obj


@pytest.fixture
def m1_file(tmp_path):
    path = tmp_path / "m1.cm"
    path.write_text(serialize_machine(machine_m1()))
    return str(path)


@pytest.fixture
def m2_file(tmp_path):
    path = tmp_path / "m2.cm"
    path.write_text(serialize_machine(machine_m2()))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as stop:
        main(["--version"])
    assert stop.value.code == 0
    assert "avasskit 0.1.0" in capsys.readouterr().out


def test_missing_verb_is_usage_error(capsys):
    with pytest.raises(SystemExit) as stop:
        main([])
    assert stop.value.code == 3
    assert "error" in capsys.readouterr().err


def test_parse_echoes_canonical_form(capsys, m1_file):
    code, out, _ = run(capsys, "parse", m1_file)
    assert code == 0
    assert out == serialize_machine(machine_m1())


def test_parse_json_shape(capsys, m1_file):
    code, out, _ = run(capsys, "parse", m1_file, "--json")
    assert code == 0
    obj = json.loads(out)
    assert obj["name"] == "m1" and obj["dimension"] == 1
    assert len(obj["transitions"]) == 4


def test_parse_error_exits_3_with_location(capsys, tmp_path):
    path = tmp_path / "bad.cm"
    path.write_text("machine broken\ndim 1\nstate q init\ntrans q -> nowhere : x' = 1x + 0\n")
    code, _, err = run(capsys, "parse", str(path))
    assert code == 3
    assert "error:" in err


def test_missing_file_exits_3(capsys):
    code, _, err = run(capsys, "parse", "/does/not/exist.cm")
    assert code == 3 and "error:" in err


def test_classify_text(capsys, m1_file):
    code, out, _ = run(capsys, "classify", m1_file)
    assert code == 0
    lines = out.splitlines()
    assert "avass: yes" in lines
    assert "vass: no" in lines
    assert "minsky: no" in lines


def test_classify_json(capsys, m1_file):
    code, out, _ = run(capsys, "classify", m1_file, "--json")
    obj = json.loads(out)
    assert code == 0
    assert obj["avass"] is True and obj["totally-positive-avass"] is False


def test_prestar_text_has_one_line_per_state(capsys, m1_file):
    code, out, _ = run(capsys, "prestar", m1_file, "--state", "q1", "--value", "19")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("q1: ") and lines[1].startswith("q2: ")
    assert "mod 3" in lines[0]


def test_prestar_json_matches_library(capsys, m1_file):
    code, out, _ = run(capsys, "prestar", m1_file, "--state", "q1", "--value", "19",
                       "--json")
    assert code == 0
    obj = json.loads(out)
    direct = compute_pre_star(machine_m1(), Configuration("q1", (19,)))
    for state in ("q1", "q2"):
        assert from_json_obj(obj["sets"][state]).equal(direct.sets[state])
    assert obj["target"] == "q1:19" and obj["upward"] is False


def test_prestar_unknown_state_exits_3(capsys, m1_file):
    code, _, err = run(capsys, "prestar", m1_file, "--state", "zz", "--value", "0")
    assert code == 3 and "error:" in err


def test_reach_verdicts(capsys, m1_file):
    code, out, _ = run(capsys, "reach", m1_file, "--from", "q1:0", "--to", "q1:19")
    assert code == 0 and out.splitlines()[0] == "verdict: yes"
    code, out, _ = run(capsys, "reach", m1_file, "--from", "q1:10", "--to", "q1:19")
    assert code == 0 and out.splitlines()[0] == "verdict: no"


def test_reach_total_positive_route(capsys, tmp_path):
    path = tmp_path / "doubling.cm"
    path.write_text(
        "machine doubling\ndim 2\nstate q init\n"
        "trans q -> q : A = [[2,0],[0,1]] ; b = [1,1]\n")
    code, out, _ = run(capsys, "reach", str(path), "--total-positive",
                       "--from", "q:0,0", "--to", "q:7,3")
    assert code == 0 and out.strip() == "verdict: yes"
    code, out, _ = run(capsys, "reach", str(path), "--total-positive",
                       "--from", "q:0,0", "--to", "q:2,1")
    assert code == 0 and out.strip() == "verdict: no"


def test_cover_both_routes(capsys, m2_file):
    for extra in ([], ["--via-reduction"]):
        code, out, _ = run(capsys, "cover", m2_file,
                           "--from", "q1:1", "--to", "q1:19", *extra)
        assert code == 0 and out.splitlines()[0] == "verdict: yes"


def test_state_reach(capsys, m1_file):
    code, out, _ = run(capsys, "state-reach", m1_file, "--from", "q1:0",
                       "--state", "q2")
    assert code == 0 and out.strip() == "verdict: yes"


def test_wsts_no_with_witness(capsys, m1_file):
    code, out, _ = run(capsys, "wsts", m1_file)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "verdict: no"
    assert lines[1].startswith("witness: q1 -> q1")
    assert lines[2].startswith("counterexample: q1:")


def test_wsts_yes(capsys, m2_file):
    code, out, _ = run(capsys, "wsts", m2_file)
    assert code == 0 and out.strip() == "verdict: yes"


def test_wsts_json(capsys, m1_file):
    code, out, _ = run(capsys, "wsts", m1_file, "--json")
    obj = json.loads(out)
    assert code == 0
    assert obj["verdict"] == "no" and "q1 -> q1" in obj["witness"]


def test_strong_mono(capsys, m1_file, tmp_path):
    # m1 (and m2) keep the order-reversing transition: per-step monotony fails.
    code, out, _ = run(capsys, "strong-mono", m1_file)
    assert code == 0 and out.splitlines()[0] == "verdict: no"
    plain = tmp_path / "drop.cm"
    plain.write_text("machine drop\ndim 1\nstate q init\ntrans q -> q : x' = 1x + -3\n")
    code, out, _ = run(capsys, "strong-mono", str(plain))
    assert code == 0 and out.strip() == "verdict: yes"


def test_wqo_verdicts(capsys, tmp_path):
    leq = tmp_path / "leq.pf"
    leq.write_text("vars x y\nx <= y\n")
    code, out, _ = run(capsys, "wqo", str(leq))
    assert code == 0 and out.strip() == "verdict: wqo"

    geq = tmp_path / "geq.pf"
    geq.write_text("vars x y\ny <= x\n")
    code, out, _ = run(capsys, "wqo", str(geq))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "verdict: not-wqo"
    assert lines[1].startswith("witness-head: ")

    strict = tmp_path / "lt.pf"
    strict.write_text("vars x y\nx < y\n")
    code, out, _ = run(capsys, "wqo", str(strict))
    assert code == 0 and out.splitlines()[0] == "verdict: not-quasi-ordering"


def test_wqo_json_witness_head(capsys, tmp_path):
    geq = tmp_path / "geq.pf"
    geq.write_text("vars x y\ny <= x\n")
    code, out, _ = run(capsys, "wqo", str(geq), "--json")
    obj = json.loads(out)
    assert code == 0 and obj["verdict"] == "not-wqo"
    head = obj["witness-head"]
    assert len(head) == 8
    # no pair of the emitted sequence may relate under the tested ordering
    relation = parse_formula("y <= x")
    for i, a in enumerate(head):
        for b in head[i + 1:]:
            assert not evaluate(relation, {"x": a, "y": b})


def test_functional_verdicts(capsys, tmp_path):
    fun = tmp_path / "fun.cm"
    fun.write_text("machine f\ndim 1\nstate q init\ntrans q -> q : formula 2x' = x\n")
    code, out, _ = run(capsys, "functional", str(fun))
    assert code == 0 and out.strip() == "verdict: yes"

    loose = tmp_path / "loose.cm"
    loose.write_text("machine g\ndim 1\nstate q init\ntrans q -> q : formula x <= x'\n")
    code, out, _ = run(capsys, "functional", str(loose))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "verdict: no" and lines[1].startswith("not functional: q -> q")


def test_functional_arity_exit_4(capsys, tmp_path):
    wide = tmp_path / "wide.cm"
    wide.write_text("machine w\ndim 2\nstate q init\n"
                    "trans q -> q : formula x1' = x1 and x2' = x2\n")
    code, _, err = run(capsys, "functional", str(wide))
    assert code == 4 and "error:" in err


def test_gen_examples_round_trip(capsys):
    code, out, _ = run(capsys, "gen", "examples")
    assert code == 0
    chunks = [c for c in out.split("# ") if c.strip()]
    assert len(chunks) == 3
    first = chunks[0].split("\n", 1)[1]
    assert parse_machine(first) == machine_m1()


def test_gen_pcp_matches_builder(capsys):
    code, out, _ = run(capsys, "gen", "pcp", "--tiles", "1:101,10:00,011:11")
    assert code == 0
    body = out.split("\n", 1)[1]
    built = build_pcp_machine(PCPInstance((("1", "101"), ("10", "00"), ("011", "11"))))
    assert parse_machine(body) == built


def test_gen_n1_defaults_halt_to_last_state(capsys, tmp_path):
    src = tmp_path / "mm.cm"
    src.write_text("machine mm\ndim 2\nstate a init\nstate b\n"
                   "trans a -> b : inc 1\n")
    code, out, _ = run(capsys, "gen", "n1", "--minsky", str(src))
    assert code == 0
    built = parse_machine(out.split("\n", 1)[1])
    assert built.flavor == "relational"
    # halt edge targets the last declared state
    assert built.transitions[-1].target == "b"


def test_gen_n2_name_override(capsys, tmp_path):
    src = tmp_path / "mm.cm"
    src.write_text("machine mm\ndim 2\nstate a init\ntrans a -> a : zero? 1\n")
    code, out, _ = run(capsys, "gen", "n2", "--minsky", str(src), "--name", "big")
    assert code == 0
    built = parse_machine(out.split("\n", 1)[1])
    assert built.name == "big" and built.dimension == 4


def test_gen_missing_input_exits_3(capsys):
    code, _, err = run(capsys, "gen", "n1")
    assert code == 3 and "needs --minsky" in err
    code, _, err = run(capsys, "gen", "pcp")
    assert code == 3 and "needs --tiles" in err


def test_gen_bad_tiles_exit_3(capsys):
    code, _, err = run(capsys, "gen", "pcp", "--tiles", "1:0:1")
    assert code == 3
    code, _, err = run(capsys, "gen", "pcp", "--tiles", "2:0")
    assert code == 3


def test_sim_post_lists_closure(capsys, m1_file):
    code, out, _ = run(capsys, "sim", m1_file, "--from", "q1:10")
    assert code == 0
    assert out.splitlines() == ["q1:10", "q1:9", "truncated: no"]


def test_sim_post_json(capsys, m1_file):
    code, out, _ = run(capsys, "sim", m1_file, "--from", "q1:10", "--json")
    obj = json.loads(out)
    assert code == 0
    assert obj == {"configs": ["q1:10", "q1:9"], "truncated": False}


def test_sim_path_search(capsys, m1_file):
    code, out, _ = run(capsys, "sim", m1_file, "--from", "q1:0", "--pre", "q1:19")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "verdict: yes"
    assert lines[2].startswith("path: q1:0 -> ") and lines[2].endswith("q1:19")


def test_sim_path_upward(capsys, m2_file):
    code, out, _ = run(capsys, "sim", m2_file, "--from", "q1:1",
                       "--pre", "q1:19", "--upward", "--max-value", "64")
    assert code == 0 and out.splitlines()[0] == "verdict: yes"


def test_sim_budget_flags(capsys, m1_file):
    code, out, _ = run(capsys, "sim", m1_file, "--from", "q1:0",
                       "--pre", "q1:19", "--max-value", "5")
    assert code == 0
    assert out.splitlines()[0] == "verdict: no"
    assert "truncated: yes" in out


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "avasskit.cli", "--version"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "avasskit 0.1.0" in proc.stdout
