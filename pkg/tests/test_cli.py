"""Command-line runs: exit codes, artifacts and byte-identical reports."""
import json
import shutil
import subprocess
import sys

import pytest

from rdsmeta.cli import main
from rdsmeta.config import data_path


def run(tmp_path, *args):
    return main([*args, "--output-dir", str(tmp_path), "--quiet"])


def test_escape_passes(tmp_path):
    assert run(tmp_path, "escape", "--samples", "200000", "--seed", "3") == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["status"] == "pass"
    assert (tmp_path / "survivor_trace.tsv").is_file() and (tmp_path / "mc_counts.tsv").is_file()
    assert "total" in json.loads((tmp_path / "timing.json").read_text())


def test_escape_fails_against_wrong_target(tmp_path):
    cfg = json.loads(data_path("run_escape.json").read_text())
    cfg["targets"]["rate"] = "log 3"
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    assert main(["escape", "--config", str(p), "--samples", "100000", "--output-dir", str(tmp_path / "o")]) == 1
    assert json.loads((tmp_path / "o" / "report.json").read_text())["status"] == "fail"


@pytest.mark.parametrize("args", [
    ["escape", "--horizon", "0"],
    ["escape", "--samples", "5"],
    ["example4", "--system", "/nonexistent.json"],
    ["escape", "--config", "/nonexistent.json"],
])
def test_config_errors(tmp_path, args, capsys):
    assert run(tmp_path, *args) == 2
    assert "configuration error" in capsys.readouterr().err


def test_wrong_experiment_in_config(tmp_path):
    assert run(tmp_path, "escape", "--config", str(data_path("run_example4.json"))) == 2


def test_example3_skipped_without_map_spec(tmp_path, capsys):
    assert main(["example3", "--output-dir", str(tmp_path)]) == 3
    assert "skipped" in capsys.readouterr().out
    assert json.loads((tmp_path / "report.json").read_text())["status"] == "skipped"


def test_bad_fit_window_syntax(tmp_path):
    with pytest.raises(SystemExit):
        run(tmp_path, "escape", "--fit-window", "3")


def test_example4_artifacts_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "example4") == 0
    assert run(b, "example4") == 0
    for name in ("report.json", "lyapunov_running.tsv", "oseledets_vectors.tsv", "decomposition.dot",
                 "decomposition.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    rep = json.loads((a / "report.json").read_text())
    assert "wall_clock" not in rep and all(c["passed"] for c in rep["criteria"].values())


def test_escape_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(a, "escape", "--samples", "50000", "--seed", "11")
    run(b, "escape", "--samples", "50000", "--seed", "11")
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "mc_counts.tsv").read_bytes() == (b / "mc_counts.tsv").read_bytes()


@pytest.mark.skipif(shutil.which("rds") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = subprocess.run(["rds", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "example4" in out.stdout
    out = subprocess.run([sys.executable, "-m", "rdsmeta.cli", "escape", "--horizon", "0",
                          "--output-dir", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 2
