import json

import pytest

from kummer.cli import run


def test_delta_example(capsys):
    assert run(["delta", "--a", "2", "--N", "2"]) == 0
    assert capsys.readouterr().out == "64\n"


def test_minrep_example(capsys):
    assert run(["minrep", "--a", "1", "--N", "3", "--expr", "2", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data == {"count": 2, "witness": [{"sign": 1, "i": 0, "j": 0, "mult": 2}]}


def test_minrep_exhausted_is_inconclusive(capsys):
    assert run(["minrep", "--a", "1", "--N", "7", "--expr", "2*z + 3*z^2 - 5*z^4",
                "--bound", "3"]) == 3


def test_verify_writes_report(tmp_path):
    out = tmp_path / "out.json"
    assert run(["verify", "--suite", "lemma3.4", "--trials", "200", "--seed", "42",
                "--json", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["suite"] == "lemma3.4" and data["seed"] == 42 and data["failures"] == []
    again = tmp_path / "again.json"
    run(["verify", "--suite", "lemma3.4", "--trials", "200", "--seed", "42", "--json", str(again)])
    assert out.read_bytes() == again.read_bytes()


def test_verify_failure_exit_code(tmp_path):
    assert run(["verify", "--suite", "lemma4.1", "--trials", "20", "--seed", "0",
                "--param", "fields=[[2,3]]", "--csv", str(tmp_path / "t.csv")]) == 1
    assert (tmp_path / "t.csv").read_text().startswith("trial,verdict")


def test_usage_errors(capsys):
    assert run(["bogus"]) == 2
    assert run(["delta", "--a", "2"]) == 2
    assert run(["delta", "--a", "4", "--N", "3"]) == 2
    assert run(["delta", "--a", "2", "--N", "2", "--nope"]) == 2
    assert run(["minrep", "--a", "1", "--N", "3", "--expr", "2 +"]) == 2
    err = capsys.readouterr().err
    assert "position 3" in err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "k.cfg"
    cfg.write_text("# field\na = 2\nN = 2\nformat = json\n")
    assert run(["delta", "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["delta"] == "64"
    assert run(["delta", "--config", str(cfg), "--a", "3", "--format", "text"]) == 0
    assert capsys.readouterr().out == "144\n"


@pytest.mark.parametrize("cmd", [
    ["field", "--a", "2", "--N", "8"],
    ["eval", "--a", "2", "--N", "3", "--expr", "1 + z*r", "--prec", "64"],
    ["measure", "--a", "2", "--N", "2", "--expr", "1 + r", "--tol", "2^-80"],
    ["decompose", "--a", "2", "--N", "6", "--expr", "1 + z*r^2", "--step", "3:6"],
    ["constants", "--k", "2"],
])
@pytest.mark.parametrize("fmt", ["text", "json", "csv"])
def test_subcommands_in_every_format(cmd, fmt, capsys):
    assert run(cmd + ["--format", fmt]) == 0
    out = capsys.readouterr().out
    assert out
    if fmt == "json":
        json.loads(out)


def test_text_output_carries_widths(capsys):
    run(["measure", "--a", "2", "--N", "2", "--expr", "1 + r"])
    out = capsys.readouterr().out
    assert "house = 2.41421356237309" in out and "±" in out


def test_constants_exhausted(capsys):
    assert run(["constants", "--k", "1", "--delta", "1/5", "--search-cap", "1000000"]) == 3
