import json

import pytest

from src.clients.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from src.clients.pipeline import RunConfig, StrategyMismatch, check_strategy
from src.common.config import DEPTH_ENV


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv(DEPTH_ENV, raising=False)


def test_run_writes_run_directory(tmp_path, capsys):
    out = tmp_path / "misA"
    assert main(["run", "--ce", "misA", "--iters", "200", "--out", str(out)]) == EXIT_OK
    for name in ("traj.jsonl", "traj.csv", "cert.json", "instance.json"):
        assert (out / name).is_file()
    cert = json.loads((out / "cert.json").read_text())
    assert cert["verdict"] == "oscillating"
    inst = json.loads((out / "instance.json").read_text())
    assert inst["run"]["strategy"] == "open1"
    assert inst["run"]["L"] == 0.0
    assert "misA: verdict=oscillating" in capsys.readouterr().out

    assert main(["report", str(out)]) == EXIT_OK
    svg = (out / "figure.svg").read_text()
    assert 'class="constraint"' in svg and 'class="step"' in svg
    header = (out / "rates.csv").read_text().splitlines()[0]
    assert header == "t,primal_gap,fw_gap,bound,log10_t,log10_primal_gap,log10_bound"

    assert main(["rates", "--traj", str(out / "traj.jsonl"), "--L", "1", "--diam", "1", "--strategy", "open1"]) == EXIT_OK


def test_strategy_mismatch_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--ce", "1", "--strategy", "open1", "--out", str(tmp_path)])
    assert exc.value.code == EXIT_USAGE


def test_forced_strategy_is_allowed():
    rc = RunConfig(ce="1", out=None, strategy="open1", force=True)
    assert check_strategy(rc) == "open1"
    with pytest.raises(StrategyMismatch, match="--force"):
        check_strategy(RunConfig(ce="1", out=None, strategy="open1"))


def test_report_on_empty_directory(tmp_path, capsys):
    assert main(["report", str(tmp_path)]) == EXIT_USAGE
    assert "fwlab: error:" in capsys.readouterr().err


def test_reference_prints_exact_iterates(capsys):
    assert main(["reference", "--ce", "4", "--iters", "2", "--depth", "4"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3
    assert json.loads(lines[0]) == {"t": 0, "x": ["0", "1"], "x_float": [0.0, 1.0]}
    assert json.loads(lines[2])["x"] == ["0", "1/12"]


def test_reference_without_closed_form(capsys):
    assert main(["reference", "--ce", "3", "--iters", "2", "--depth", "4"]) == EXIT_FAIL
    assert "no closed-form reference" in capsys.readouterr().err


def test_validate(capsys):
    assert main(["validate", "--ce", "2", "--depth", "6"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["passed"]
    assert main(["validate", "--ce", "misA"]) == EXIT_FAIL


def test_bad_L_value():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--ce", "4", "--L", "-1"])
    assert exc.value.code == EXIT_USAGE
