from pathlib import Path

import pytest

from src.common.config import DEPTH_ENV, ConfigError, load_config


def test_defaults_without_file():
    cfg = load_config(environ={})
    assert cfg.run.depth == 40
    assert cfg.run.iterations == 2000
    assert cfg.solver.linesearch_tol == 1e-12
    assert cfg.output.dir == Path("./runs")
    assert cfg.logging.level == "INFO"


def test_shipped_default_yaml():
    cfg = load_config(Path(__file__).parent.parent / "config" / "default.yaml", environ={})
    assert cfg.run.K == 2
    assert cfg.run.r_scale == pytest.approx(1e-4)


def test_yaml_values_and_env_override(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("run:\n  depth: 12\n  iterations: 50\nlogging:\n  level: DEBUG\n")
    cfg = load_config(p, environ={})
    assert (cfg.run.depth, cfg.run.iterations, cfg.logging.level) == (12, 50, "DEBUG")
    assert load_config(p, environ={DEPTH_ENV: "7"}).run.depth == 7


@pytest.mark.parametrize("value", ["x", "1"])
def test_bad_env_depth(value):
    with pytest.raises(ConfigError, match=DEPTH_ENV):
        load_config(environ={DEPTH_ENV: value})


def test_invalid_files(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.yaml", environ={})
    p = tmp_path / "list.yaml"
    p.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(p, environ={})
    p.write_text("solver:\n  linesearch_tol: 0.1\n")
    with pytest.raises(ConfigError, match="linesearch_tol"):
        load_config(p, environ={})
