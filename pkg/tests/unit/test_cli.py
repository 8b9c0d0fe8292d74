"""
Unit tests for the command-line interface and its exit codes.
"""

import json
import logging

import pytest
from click.testing import CliRunner

from dilutehom import __version__
from dilutehom.cli import cli, run
from dilutehom.core.config import Config


@pytest.fixture(autouse=True)
def restore_logging():
    """The CLI installs a stderr handler on the package logger; drop it after each test."""
    root = logging.getLogger("dilutehom")
    handlers, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        root.removeHandler(handler)
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)
    logging.captureWarnings(False)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_version():
    result = CliRunner().invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "dilutehom" in result.output
    assert __version__ in result.output


def test_list_checks():
    result = CliRunner().invoke(cli, ["list-checks"])
    assert result.exit_code == 0
    assert result.output.startswith("Available checks:")
    assert "gauss_identities" in result.output


def test_init_config(workdir):
    result = CliRunner().invoke(cli, ["init-config", "-o", "custom.yaml"])
    assert result.exit_code == 0
    assert "Default configuration saved to: custom.yaml" in result.output
    loaded = Config.load_from_file(str(workdir / "custom.yaml"))
    assert loaded.to_dict() == Config().to_dict()


def test_green_table_to_stdout(capsys):
    assert run(["green", "--grid", "2"]) == 0
    lines = capsys.readouterr().out.split("\r\n")
    assert lines[0].startswith("# dilutehom green config=")
    assert lines[1] == "x,y,G,R"
    assert len([line for line in lines[2:] if line]) == 4


def test_green_check_expansion(capsys):
    assert run(["green", "--check-expansion"]) == 0
    out = capsys.readouterr().out
    assert "R(0) = " in out
    slope = float(out.split("slope = ", 1)[1].splitlines()[0])
    assert 3.8 <= slope <= 4.2
    assert "quadratic coefficient = " in out


def test_tensor_to_csv(workdir):
    code = run(["tensor", "--shape", "circle:0.25", "--eta", "0.3,0.2,0.1", "--nodes", "64", "--out", "t.csv"])
    assert code == 0
    lines = (workdir / "t.csv").read_text(encoding="utf-8").split("\r\n")
    assert lines[0].startswith("# dilutehom tensor")
    assert lines[1] == "eta,a11,a12,a22,residual,mineig"
    rows = [line for line in lines[2:] if line]
    assert [float(r.split(",")[0]) for r in rows] == [0.3, 0.2, 0.1]


def test_save_uses_configured_formats(workdir):
    config = Config.from_dict({"output": {"directory": "results", "formats": ["csv", "json"]}})
    config.save_to_file("run.yaml")
    assert run(["-c", "run.yaml", "green", "--grid", "2", "--save"]) == 0
    assert (workdir / "results" / "green.csv").exists()
    data = json.loads((workdir / "results" / "green.json").read_text(encoding="utf-8"))
    assert data["command"] == "green"
    assert len(data["table"]["rows"]) == 4


def test_invalid_eta_exits_2(capsys):
    assert run(["cell", "--eta", "0"]) == 2
    assert "eta must be in (0,1]" in capsys.readouterr().err


def test_bad_output_suffix(workdir, capsys):
    assert run(["green", "--grid", "2", "--out", "table.txt"]) == 2
    assert "cannot infer an output format" in capsys.readouterr().err
    assert not (workdir / "table.txt").exists()


def test_usage_error():
    assert run(["tensor", "--no-such-option"]) == 2
    assert run(["green", "--grid", "0"]) == 2


def test_selftest_passes(workdir, capsys):
    code = run(["selftest", "--only", "gauss_identities", "--no-color", "--json", "checks.json"])
    assert code == 0
    out = capsys.readouterr().out
    assert "gauss_identities" in out
    assert "\033[" not in out
    data = json.loads((workdir / "checks.json").read_text(encoding="utf-8"))
    assert data["table"]["summary"]["PASS"] == 1


def test_selftest_perturbed_weight_fails(capsys):
    """A perturbed quadrature weight turns the Gauss check into a failure and exit 1."""
    code = run(["selftest", "--only", "gauss_identities", "--no-color", "--perturb-weight", "1e-3"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out
