import json

import pytest

from qmkit import cli

DEFAULT_RUNS = [["cg"], ["zeeman"], ["rotate"], ["rabi"], ["lz"], ["fgr-decay", "--nband", "200"],
                ["gamow"], ["ring-spectrum"], ["ab-flux-sweep"], ["network"], ["fabry-perot"],
                ["sphere-xsec"], ["phase-shifts"], ["born"], ["wigner"], ["dimer"], ["bell"],
                ["schmidt"], ["shor", "15"], ["rsa"], ["qft-demo"]]


def run(argv, capsys):
    code = cli.run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv", DEFAULT_RUNS, ids=lambda a: a[0])
def test_every_subcommand_runs_in_both_formats(argv, capsys):
    code, out, _ = run(argv + ["--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["header"]["subcommand"] == argv[0]
    assert doc["header"]["seed"] == cli.DEFAULT_SEED
    code, out, _ = run(argv + ["--format", "csv"], capsys)
    assert code == 0
    assert out.startswith("# ")


def test_list(capsys):
    code, out, _ = run(["list"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "subcommand,topic"
    assert len(lines) == 1 + len(cli.COMMANDS)


def test_output_is_byte_identical(capsys):
    _, a, _ = run(["shor", "21", "--seed", "7"], capsys)
    _, b, _ = run(["shor", "21", "--seed", "7"], capsys)
    assert a == b
    assert json.loads(a)["data"]["factors"] == [3, 7]


def test_bad_arguments_exit_2(capsys):
    assert run(["cg", "--j1", "0.3"], capsys)[0] == 2
    assert run(["nope"], capsys)[0] == 2
    assert run(["cg", "--j1", "abc"], capsys)[0] == 2
    assert run(["fabry-perot", "--g", "2"], capsys)[0] == 2
    assert run([], capsys)[0] == 2


def test_threads_variable_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("QMKIT_THREADS", "zero")
    assert run(["cg"], capsys)[0] == 2
    monkeypatch.setenv("QMKIT_THREADS", "2")
    assert run(["cg"], capsys)[0] == 0


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.csv"
    assert run(["ab-flux-sweep", "--out", str(path)], capsys)[0] == 0
    text = path.read_text()
    assert text.startswith("# ") and "\n" in text


def test_bell_reports_chsh(capsys):
    _, out, _ = run(["bell", "--format", "json"], capsys)
    data = json.loads(out)["data"]
    assert abs(abs(data["chsh"]) - 2 * 2 ** 0.5) < 1e-12


def test_negative_range_argument(capsys):
    code, out, _ = run(["ab-flux-sweep", "--n", "-2..2", "--format", "json"], capsys)
    assert code == 0


def test_number_parsing():
    assert cli.number("2pi") == pytest.approx(2 * 3.141592653589793)
    assert cli.number("π/4") == pytest.approx(0.7853981633974483)
    assert cli.number("1e-3") == 1e-3
    with pytest.raises(Exception):
        cli.number("__import__('os')")
    assert cli.sweep("0..1/3") == [0.0, 0.5, 1.0]
    assert cli.sweep("-1..1") == [-1.0, 0.0, 1.0]
    assert cli.sweep("1,2pi") == pytest.approx([1.0, 6.283185307179586])


def test_float_formatting():
    assert cli._fmt(0.1) == "0.10000000000000001"
    assert cli._fmt(float("inf")) == "null"
    assert cli._fmt(-0.0) == "0"
    assert cli.to_json({"a": [1, 2.5], "b": None}) == '{\n  "a": [1, 2.5],\n  "b": null\n}'
