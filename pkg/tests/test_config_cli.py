import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from dynheat.cli import main
from dynheat.config import ExperimentConfig, apply_example, load_config, parse_config
from dynheat.experiments import cmd_forward, cmd_reconstruct, cmd_refine, refinement_levels
from dynheat.presets import compile_field


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def small(**changes):
    return ExperimentConfig(**{"n_cells": 32, "n_steps": 64, **changes})


def test_config_round_trip():
    cfg = ExperimentConfig(p=(0.01, 0.05), seed=11, r="1 + 0.5*sin(pi*t)*x", source="gaussian")
    again = parse_config(cfg.to_text())
    assert again == cfg
    assert parse_config(again.to_text()).to_text() == cfg.to_text()


def test_config_defaults_match_examples():
    cfg = ExperimentConfig()
    assert (cfg.ell, cfg.T, cfg.r, cfg.y0, cfg.a) == (1.0, 1.0, "1", "0", "0")
    assert (cfg.n_cells, cfg.n_steps) == (256, 512)


def test_config_file(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text("[discretization]\nn_cells = 64\n\n[noise]\np = 0.02\n")
    cfg = load_config(path)
    assert cfg.n_cells == 64 and cfg.p == (0.02,)


@pytest.mark.parametrize("text", [
    "[bogus]\nx = 1\n",
    "[noise]\ncolour = red\n",
    "[noise]\np = \n",
    "[truth]\nsource = nonsense_name(\n",
    "[noise]\nmode = loud\n",
])
def test_config_rejects(text):
    with pytest.raises(ValueError):
        parse_config(text)


def test_config_error_names_path(tmp_path):
    with pytest.raises(ValueError, match="missing.ini"):
        load_config(tmp_path / "missing.ini")


def test_examples_overlay():
    cfg = apply_example(ExperimentConfig(), 2)
    assert cfg.source == "sine" and cfg.epsilon == 1e-8 and cfg.mode == "paper"
    assert apply_example(ExperimentConfig(), 3).p == (0.0, 0.01, 0.03, 0.05)


def test_compile_field():
    assert compile_field("2.5") == 2.5
    fn = compile_field("exp(-8*(x-0.5)**2)")
    assert fn(np.array([0.5]))[0] == 1.0
    r = compile_field("1 + t*x", ("t", "x"))
    assert r(2.0, 3.0) == 7.0
    with pytest.raises(ValueError):
        compile_field("__import__('os')")


def test_table_field(tmp_path):
    path = tmp_path / "tab.csv"
    path.write_text("x,value\n0,0\n1,2\n")
    fn = compile_field(f"table:{path}")
    assert fn(np.array([0.25]))[0] == pytest.approx(0.5)


def test_forward_artifacts(tmp_path):
    arts = cmd_forward(small(), tmp_path)
    header, rows = read_csv(tmp_path / "final_time.csv")
    assert header == ["x", "value"] and len(rows) == 33
    header, rows = read_csv(tmp_path / "trajectory.csv")
    assert header == ["t", "x", "value"] and len(rows) == 65 * 33
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "forward" and len(manifest["artifacts"]) == len(arts)


def test_forward_zero_source(tmp_path):
    cmd_forward(small(source="zero"), tmp_path)
    _, rows = read_csv(tmp_path / "trajectory.csv")
    assert all(float(r[2]) == 0.0 for r in rows)


def test_reconstruct_from_truth(tmp_path):
    _, traces = cmd_reconstruct(small(p=(0.0,), f0="parabolic", epsilon=0.0), tmp_path)
    header, rows = read_csv(tmp_path / "recovered_p0.csv")
    assert header == ["x", "f_true", "f_rec"]
    assert all(abs(float(a) - float(b)) <= 1e-10 for _, a, b in rows)
    assert (tmp_path / "table1.csv").exists()


def test_reconstruct_parallel_matches_serial(tmp_path):
    cfg = small(p=(0.01, 0.05), max_iter=5, e_J=1e-12)
    cmd_reconstruct(cfg, tmp_path / "serial")
    cmd_reconstruct(cfg, tmp_path / "parallel", jobs=2)
    for name in ("trace_p1.csv", "trace_p5.csv", "summary.csv"):
        assert (tmp_path / "serial" / name).read_text() == (tmp_path / "parallel" / name).read_text()


def test_refine_report(tmp_path):
    report = cmd_refine(small(n_cells=64, n_steps=128), tmp_path)
    assert report["forward"]["order"] >= 1.9
    assert report["adjoint_identity"]["order"] >= 1.9
    assert report["gradient_fd"]["order"] >= 1.9
    assert max(report["constant_solution"]["errors"]) <= 1e-12
    header, rows = read_csv(tmp_path / "refine.csv")
    assert header == ["study", "n_cells", "n_steps", "error"] and len(rows) == 16


def test_refine_levels():
    assert refinement_levels(256) == [32, 64, 128, 256]
    with pytest.raises(ValueError):
        refinement_levels(20)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["forward", "--n-cells", "16", "--n-steps", "32", "--out", str(tmp_path / "f")]) == 0
    assert main(["reconstruct", "--config", str(tmp_path / "nope.ini")]) == 2
    assert "nope.ini" in capsys.readouterr().err


def test_cli_example_reconstruct(tmp_path):
    out = tmp_path / "ex1"
    code = main(["reconstruct", "--example", "1", "--n-cells", "64", "--n-steps", "128",
                 "--seed", "0", "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out / "summary.csv")
    assert header == ["p", "stop_iteration", "stop_reason", "J", "E"] and len(rows) == 3


def test_cli_noise_mode_override(tmp_path):
    main(["reconstruct", "--example", "1", "--noise-mode", "zeromean", "--n-cells", "16",
          "--n-steps", "32", "--out", str(tmp_path)])
    assert "mode = zeromean" in (tmp_path / "config.ini").read_text()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dynheat", "selftest", "--n-cells", "16", "--n-steps", "32"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "FAIL" not in proc.stdout
