import csv
import io
import json
from fractions import Fraction

import pytest

from phantomgames import breakers
from phantomgames.cli import EXIT_OK, EXIT_REFUSED, EXIT_USAGE, EXIT_VERIFY, main

K3 = ["--game", "connectivity", "--n", "3", "--a", "1", "--b", "1"]
SIM = ["simulate", *K3, "--maker", "random", "--breaker", "random", "--trials", "10", "--seed", "7"]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# -- simulate ------------------------------------------------------------------

def test_simulate_k3(capsys):
    code, out, _ = run(SIM, capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["config"]["game"] == "Connectivity" and doc["config"]["seed"] == 7
    assert doc["stats"]["trials"] == 10
    # K3 (1:1) is won with probability exactly 1/2, so ten trials are not all wins
    assert doc["stats"]["frequency"] == 0.7


def test_simulate_forced_win(capsys):
    argv = ["simulate", "--game", "conn", "--n", "3", "--a", "2", "--b", "1",
            "--maker", "random", "--breaker", "random", "--trials", "10", "--seed", "7"]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK and json.loads(out)["stats"]["frequency"] == 1.0


def test_simulate_odd_perfect_matching(capsys):
    argv = ["simulate", "--game", "pm", "--n", "5", "--a", "1", "--b", "1",
            "--maker", "random", "--breaker", "random", "--trials", "10"]
    code, _, err = run(argv, capsys)
    assert code == EXIT_USAGE and "even" in err


def test_simulate_unknown_maker_lists_registry(capsys):
    argv = ["simulate", *K3, "--maker", "nosuch", "--breaker", "random", "--trials", "10"]
    code, _, err = run(argv, capsys)
    assert code == EXIT_USAGE
    assert "makers:" in err and "hamilton" in err and "star-phases" in err


@pytest.mark.parametrize("argv", [
    ["simulate", "--n", "3", "--a", "1", "--b", "1", "--maker", "random", "--breaker", "random",
     "--trials", "5"],
    ["simulate", *K3, "--maker", "random", "--breaker", "random", "--trials", "x"],
    ["simulate", *K3, "--maker", "random", "--breaker", "random", "--trials", "0"],
    ["simulate", "--game", "chess", "--n", "3", "--a", "1", "--b", "1", "--maker", "random",
     "--breaker", "random", "--trials", "5"],
    ["simulate", *K3, "--maker", "mindeg-large", "--breaker", "random", "--trials", "5",
     "--param", "nosuch=1"],
    [],
])
def test_simulate_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == EXIT_USAGE


def test_simulate_output_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    ham = ["simulate", "--game", "ham", "--n", "20", "--a", "1", "--b", "1", "--maker", "hamilton",
           "--breaker", "random", "--trials", "30", "--seed", "3", "--records"]
    assert main([*ham, "--out", str(a)]) == EXIT_OK
    assert main([*ham, "--out", str(b), "--workers", "3"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert len(json.loads(a.read_text())["records"]) == 30


def test_config_file_merges_and_flags_win(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# K3 connectivity\ngame = connectivity\nn = 3\na = 1\nb = 1\n"
                    "maker = random\nbreaker = random\ntrials = 10\nseed = 99\n")
    code, from_file, _ = run(["--config", str(conf), "simulate", "--seed", "7"], capsys)
    assert code == EXIT_OK
    _, direct, _ = run(SIM, capsys)
    assert from_file == direct


def test_effective_config_round_trip(tmp_path, capsys):
    argv = ["simulate", "--game", "mindegree", "--n", "12", "--a", "1", "--b", "2",
            "--maker", "mindeg-large", "--breaker", "star-phases", "--trials", "20", "--seed", "5",
            "--param", "phase_cap=9"]
    _, first, _ = run(argv, capsys)
    cfg = json.loads(first)["config"]
    lines = []
    for key, val in cfg.items():
        if key == "params":
            lines += [f"param.{k} = {v}" for k, v in val.items()]
        else:
            lines.append(f"{key} = {val}")
    conf = tmp_path / "eff.conf"
    conf.write_text("\n".join(lines) + "\n")
    _, second, _ = run(["--config", str(conf), "simulate"], capsys)
    assert second == first


def test_bad_config_file(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("n 3\n")
    assert run(["--config", str(conf), "simulate"], capsys)[0] == EXIT_USAGE
    assert run(["--config", str(tmp_path / "missing"), "simulate"], capsys)[0] == EXIT_USAGE


# -- sweep ---------------------------------------------------------------------

SWEEP = ["sweep", "--game", "connectivity", "--n", "4", "--a", "1", "--maker", "random",
         "--breaker", "random", "--trials", "20", "--seed", "1"]


def test_sweep_single_cell(capsys):
    code, out, _ = run([*SWEEP, "--b", "2"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 2 and rows[0][0] == "game"


def test_sweep_range(capsys):
    code, out, _ = run([*SWEEP, "--b", "1..3"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 4


def test_sweep_malformed_range(capsys):
    assert run([*SWEEP, "--b", "3..1"], capsys)[0] == EXIT_USAGE
    assert run([*SWEEP, "--b", "1..z"], capsys)[0] == EXIT_USAGE


def test_sweep_budget_refusal(capsys):
    code, _, err = run([*SWEEP, "--b", "1..3", "--budget", "10"], capsys)
    assert code == EXIT_REFUSED and "budget" in err


def test_sweep_unknown_pair(capsys):
    argv = [*SWEEP, "--b", "1"]
    argv[argv.index("--breaker") + 1] = "random,nosuch"
    assert run(argv, capsys)[0] == EXIT_USAGE


def test_sweep_out_file_resume(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main([*SWEEP, "--b", "1..3", "--out", str(out)]) == EXIT_OK
    full = out.read_text()
    out.write_text("".join(full.splitlines(keepends=True)[:3]))
    assert main([*SWEEP, "--b", "1..3", "--out", str(out)]) == EXIT_OK
    assert out.read_text() == full


# -- exact ---------------------------------------------------------------------

def test_exact_k3_connectivity(capsys):
    code, out, _ = run(["exact", *K3], capsys)
    lines = out.split()
    assert code == EXIT_OK
    assert lines[0] == "1/2" and float(lines[1]) == 0.5


def test_exact_k3_two_to_one(capsys):
    code, out, _ = run(["exact", "--game", "conn", "--n", "3", "--a", "2", "--b", "1"], capsys)
    assert code == EXIT_OK and out.split()[0] == "1/1"


def test_exact_k4_forced_loss(capsys):
    argv = ["exact", "--game", "mindegree", "--n", "4", "--a", "1", "--b", "6",
            "--maker", "random", "--breaker", "star-phases"]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK and out.split()[0] == "0/1"


def test_exact_oversized_refused(capsys):
    code, _, err = run(["exact", "--game", "conn", "--n", "12", "--a", "1", "--b", "1"], capsys)
    assert code == EXIT_REFUSED and "refused" in err


def test_exact_tree_cap_flag(capsys):
    assert run(["exact", *K3, "--tree-cap", "2"], capsys)[0] == EXIT_REFUSED


def test_exact_memo_flag_agrees(capsys):
    argv = ["exact", "--game", "conn", "--n", "4", "--a", "1", "--b", "1"]
    _, with_memo, _ = run(argv, capsys)
    _, without, _ = run([*argv, "--no-memo"], capsys)
    assert with_memo == without
    assert with_memo.split()[0] == "7/15"


def test_exact_fixture_file(tmp_path, capsys):
    path = tmp_path / "fx.jsonl"
    path.write_text(json.dumps({"game": "Connectivity", "n": 3, "a": 1, "b": 1, "k": 1,
                                "maker": "random", "breaker": "random", "num": 9, "den": 10})
                    + "\n")
    assert main(["exact", *K3, "--fixture-file", str(path)]) == EXIT_OK
    assert main(["exact", "--game", "conn", "--n", "3", "--a", "2", "--b", "1",
                 "--fixture-file", str(path)]) == EXIT_OK
    recs = [json.loads(x) for x in path.read_text().splitlines()]
    assert len(recs) == 2
    assert Fraction(recs[0]["num"], recs[0]["den"]) == Fraction(1, 2)
    assert (recs[1]["a"], recs[1]["num"], recs[1]["den"]) == (2, 1, 1)


# -- verify --------------------------------------------------------------------

def test_verify_unknown_scale(capsys):
    assert run(["verify", "--scale", "huge"], capsys)[0] == EXIT_USAGE


def test_verify_unknown_check(capsys):
    assert run(["verify", "--only", "42"], capsys)[0] == EXIT_USAGE


def test_verify_passing_check(capsys):
    code, out, _ = run(["verify", "--only", "9"], capsys)
    assert code == EXIT_OK
    assert "[PASS]" in out and "1/1 checks passed" in out


def test_verify_broken_star_bound(monkeypatch, capsys):
    monkeypatch.setattr(breakers, "star_phase_bound", lambda a, b: Fraction(-1))
    code, out, _ = run(["verify", "--only", "3", "--scale", "quick"], capsys)
    assert code == EXIT_VERIFY
    assert "[FAIL]" in out and "0/1 checks passed" in out
