import argparse
import json
import subprocess
import sys

import pytest

from minfes import cli
from minfes.homology import TABLE1, TABLE1_R, small_pleasures_dim


@pytest.fixture
def fast_table1(monkeypatch):
    def fake(bruteforce=True):
        return {(k, r): (small_pleasures_dim(3, r, k), small_pleasures_dim(3, r, k)) for r in TABLE1_R for k in range(4)}
    monkeypatch.setattr(cli, "table1", fake)
    return fake


def test_parse_range_and_cost():
    assert cli.parse_range("1..3") == range(1, 4)
    assert cli.parse_range("2") == range(2, 3)
    assert cli.parse_cost("5,12") == (5, 12)
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_range("a..b")
    assert len(cli.parse_range("3..1")) == 0


def test_table1_rows(fast_table1, capsys):
    assert cli.run(["table1", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    vals = {(c["k"], c["r"]): c["closed"] for c in doc["cases"]}
    assert len(vals) == 28
    assert vals[(1, 4)] == 11 and vals[(2, 7)] == 204 and vals[(3, 9)] == 220
    assert all(vals[(k, r)] == TABLE1[k][TABLE1_R.index(r)] for k, r in vals)


def test_table1_mismatch_fails(monkeypatch, capsys):
    monkeypatch.setattr(cli, "table1", lambda bruteforce=True: {(0, 4): (0, 1)})
    assert cli.run(["table1"]) == 1
    assert "mismatch" in capsys.readouterr().err


@pytest.mark.parametrize("suite,args", [
    ("trimmed", ["--n", "1..2", "--r", "1..2"]),
    ("serendipity", ["--n", "1..2", "--r", "2..3"]),
    ("zeroce", ["--n", "1..2", "--r", "1..2"]),
    ("tnt", ["--n", "1..2", "--r", "1"]),
    ("vem", ["--n", "1..2", "--r", "1..2"]),
    ("kunneth", ["--n", "1..2", "--r", "1"]),
    ("extdim", ["--n", "1..2", "--r", "1"]),
])
def test_verify_suites(suite, args, capsys):
    assert cli.run(["verify", suite, "--format", "json"] + args) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pass"] and doc["cases"]


def test_pretty_and_csv(capsys):
    assert cli.run(["verify", "trimmed", "--n", "1", "--r", "1"]) == 0
    assert capsys.readouterr().out.strip().endswith("passed")
    assert cli.run(["verify", "trimmed", "--n", "1", "--r", "1", "--format", "csv"]) == 0
    assert capsys.readouterr().out.splitlines()[0].startswith("suite,")


def test_build_certificates(tmp_path):
    out = tmp_path / "tnt.json"
    assert cli.run(["build", "tnt", "--n", "2", "--r", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    cert = doc["certificate"]
    assert cert["pass"] and cert["dims_match"]
    assert cert["boundary_dims"]["cube2(*,*)|1"] == 3
    assert cli.run(["build", "mcfes", "--n", "2", "--r", "2", "--inner-product", "l2",
                    "--out", str(tmp_path / "m.json")]) == 0
    assert cli.run(["build", "tnt", "--n", "2", "--r", "1", "--unaugmented",
                    "--out", str(tmp_path / "u.json")]) == 0


def test_build_is_deterministic(tmp_path):
    paths = [tmp_path / f"{i}.json" for i in range(2)]
    for p in paths:
        assert cli.run(["build", "mcfes", "--n", "2", "--r", "1", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize("argv", [
    ["verify"],
    ["verify", "nosuch"],
    ["verify", "trimmed", "--n", "5"],
    ["verify", "trimmed", "--n", "3..1"],
    ["verify", "trimmed", "--r", "11"],
    ["build", "tnt", "--n", "1..2", "--r", "1"],
    ["build", "tnt", "--n", "2", "--r", "1", "--cell", "simplex"],
    ["build", "other", "--n", "2", "--r", "1"],
])
def test_usage_errors(argv, capsys):
    assert cli.run(argv) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_max_cost_override(capsys):
    assert cli.run(["verify", "vem", "--n", "1", "--r", "11", "--max-cost", "4,11", "--format", "json"]) == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "minfes", "verify", "vem", "--n", "1", "--r", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "passed" in proc.stdout
