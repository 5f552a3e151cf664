import io
import json
import subprocess
import sys

import pytest

from hcd.cli import main
from hcd.corpus import example_data, standard_n2
from hcd.courant_dorfman import constants_equal
from hcd.structfile import dumps, loads, to_cd


@pytest.fixture
def corpus(tmp_path):
    def write(name, data=None):
        path = tmp_path / f"{name}.json"
        path.write_text(dumps(data if data is not None else example_data(name)))
        return str(path)

    return write


@pytest.mark.parametrize("name", ["standard-n2", "quadratic-lie-n2", "higher-dorfman-n3", "heisenberg-current"])
def test_check_cd_passes(corpus, name, capsys):
    assert main(["check", "cd", corpus(name), "--samples", "30"]) == 0
    assert ": PASS" in capsys.readouterr().out


def test_check_cd_twisted_fails_with_witness(corpus, capsys):
    assert main(["check", "cd", corpus("twisted-nonclosed-n2"), "--samples", "20"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL   ] jacobi bracket" in out
    assert "witness (v1, v2, v3) -> residual dx4" in out


@pytest.mark.parametrize("kind", ["pva", "lca", "weak"])
def test_check_lambda_kinds(corpus, kind):
    assert main(["check", kind, corpus("quadratic-lie-n2"), "--samples", "20"]) == 0


def test_build_then_from_theta_round_trip(corpus, tmp_path, capsys):
    chart_file = tmp_path / "chart.json"
    assert main(["build", "theta", corpus("standard-n2"), "-o", str(chart_file), "--roundtrip"]) == 0
    chart = loads(chart_file.read_text())
    assert chart["theta"] == "- theta*p_x"
    cd_file = tmp_path / "cd.json"
    assert main(["from-theta", str(chart_file), "-o", str(cd_file), "--roundtrip"]) == 0
    back = to_cd(loads(cd_file.read_text()))
    assert constants_equal(back.structure_constants(), standard_n2().structure_constants()) == []


def test_build_writes_chart_to_stdout(corpus, capsys):
    assert main(["build", "theta", corpus("quadratic-lie-n2")]) == 0
    captured = capsys.readouterr()
    assert loads(captured.out)["theta"] == "- e1*e2*e3"
    assert "PASS" in captured.err


def test_from_theta_rejects_failing_master_equation(corpus, capsys):
    data = {
        "n": 2,
        "base": ["x"],
        "generators": [{"name": "theta", "degree": 1}, {"name": "psi", "degree": 1}, {"name": "p", "degree": 2}],
        "pairing": {"x,p": "1", "theta,psi": "1"},
        "theta": "-p*theta + x*p*psi",
    }
    assert main(["from-theta", corpus("bad-theta", data)]) == 1


def test_bracket_and_lambda(corpus, capsys):
    path = corpus("standard-n2")
    assert main(["bracket", "psi", "x^2", path]) == 0
    out = capsys.readouterr().out
    assert "[psi, x^2] = 2*x" in out
    assert "<psi, x^2> = 0" in out
    assert main(["lambda", "x*psi", "theta", path]) == 0
    assert "{x*psi _L theta} = theta + Lambda*x" in capsys.readouterr().out


def test_current_check(corpus, capsys):
    assert main(["current", corpus("heisenberg-current"), "--check", "--samples", "20"]) == 0
    out = capsys.readouterr().out
    assert "formal distribution bracket identity" in out
    assert main(["current", corpus("quadratic-lie-n2"), "--dgca", "derham:1", "--check", "--samples", "10"]) == 0


def test_current_without_dgca_is_usage_error(corpus, capsys):
    assert main(["current", corpus("quadratic-lie-n2"), "--check"]) == 2


def test_reduce(corpus, capsys):
    assert main(["reduce", corpus("quadratic-lie-n2"), "--samples", "20"]) == 0
    assert main(["reduce", corpus("standard-n2"), "--z", "zero", "--samples", "5"]) == 0
    assert "VACUOUS" in capsys.readouterr().out
    assert main(["reduce", corpus("standard-n2"), "--z", "other"]) == 2


def test_rothstein(corpus, capsys):
    assert main(["rothstein", corpus("curved-connection-m2"), "--check-bianchi", "--samples", "30"]) == 0
    assert main(["rothstein", corpus("flat-connection-m2"), "--samples", "30"]) == 0
    out = capsys.readouterr().out
    assert "flat Rothstein bracket vs Darboux chart: PASS" in out
    bad = example_data("flat-connection-m2")
    bad["connection"] = {"x1,theta": {"theta": "x1"}}
    path = corpus("non-metric", bad)
    assert main(["rothstein", path]) == 1
    assert main(["rothstein", path, "--metricize", "--samples", "10"]) == 0


def test_example_command(capsys):
    assert main(["example", "list"]) == 0
    names = capsys.readouterr().out.split()
    assert "twisted-nonclosed-n2" in names and "heisenberg-current" in names
    assert main(["example", "standard-n2"]) == 0
    assert loads(capsys.readouterr().out) == example_data("standard-n2")
    assert main(["example", "nope"]) == 2


def test_usage_and_parse_errors(corpus, tmp_path, capsys):
    assert main(["bracket", "2x", "psi", corpus("standard-n2")]) == 2
    assert "at position 1" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "colour": 1}')
    assert main(["check", "cd", str(bad)]) == 2
    assert main(["check", "cd", str(tmp_path / "missing.json")]) == 2
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_machine_block_is_deterministic(corpus, capsys):
    path = corpus("twisted-nonclosed-n2")
    blocks = []
    for _ in range(2):
        assert main(["check", "cd", path, "--machine", "--seed", "7", "--samples", "15"]) == 1
        blocks.append(capsys.readouterr().out)
    assert blocks[0] == blocks[1]
    block = json.loads(blocks[0])
    assert block["command"] == "check" and block["passed"] is False
    checks = {c["name"]: c for c in block["reports"][0]["checks"]}
    assert checks["jacobi bracket"]["witnesses"][0]["inputs"] == ["v1", "v2", "v3"]


def test_stdin_input(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(dumps(example_data("standard-n2"))))
    assert main(["check", "cd", "-", "--samples", "10"]) == 0


def test_module_entry_point(corpus):
    proc = subprocess.run(
        [sys.executable, "-m", "hcd", "check", "cd", corpus("twisted-nonclosed-n2"), "--samples", "5"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "jacobi bracket" in proc.stdout
