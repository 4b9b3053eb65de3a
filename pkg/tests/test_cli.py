import json
import os
import subprocess
import sys

import numpy as np
import pytest

from depthgate.cli import main
from depthgate.formats import write_curves, write_points
from depthgate.model import FunctionalSample, Grid, MultivariateSample


@pytest.fixture
def curves(tmp_path):
    rng = np.random.default_rng(0)
    grid = Grid(np.linspace(0, 1, 21))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_curves(a, FunctionalSample(grid, np.cumsum(rng.normal(size=(12, 21)), axis=1) * 0.2))
    write_curves(b, FunctionalSample(grid, np.cumsum(rng.normal(size=(10, 21)), axis=1) * 0.2 + 1))
    return str(a), str(b)


def test_test_same_sample_accepts(curves, capsys):
    a, _ = curves
    assert main(["test", a, a, "--depth", "integrated-tukey", "--method", "joint-tp"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert (doc["tuple"]["ls_pq"], doc["tuple"]["ls_qp"]) == (0.5, 0.5)
    assert doc["outcomes"][0]["reject"] is False


def test_test_shifted_rejects(curves, capsys):
    a, b = curves
    assert main(["test", a, b, "--method", "joint-tp", "--method", "ellipsoid:w=0.5"]) == 0
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert [o["method"] for o in doc["outcomes"]] == ["joint-tp", "ellipsoid:w=0.5"]
    assert all(o["reject"] for o in doc["outcomes"])
    assert "LS tuple" in captured.err


def test_tuple_and_depth(curves, tmp_path, capsys):
    a, b = curves
    assert main(["tuple", a, b, "--depth", "h-adaptive"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert 0 <= doc["ls_pq"] <= 1 and doc["m"] == 12 and doc["n"] == 10
    out = tmp_path / "d.csv"
    assert main(["depth", a, "--query", b, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "index,depth" and len(lines) == 11


def test_points_input(tmp_path, capsys):
    rng = np.random.default_rng(1)
    p = tmp_path / "p.csv"
    write_points(p, MultivariateSample(rng.normal(size=(15, 2))))
    assert main(["tuple", str(p), str(p), "--depth", "tukey"]) == 0
    assert json.loads(capsys.readouterr().out)["ls_pq"] == 0.5


def test_exit_codes(curves, tmp_path, capsys):
    a, _ = curves
    pts = tmp_path / "p.csv"
    pts.write_text("x\n1\n2\n")
    assert main(["test", a, str(tmp_path / "none.csv")]) == 3
    assert main(["test", a, str(pts)]) == 3
    assert main(["test", a, a, "--depth", "bogus"]) == 2
    assert main(["simulate"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--scenario", "no-such"])
    assert exc.value.code == 2
    flat = tmp_path / "flat.csv"
    flat.write_text("0,0.5,1\n1,1,1\n1,1,1\n")
    assert main(["tuple", str(flat), str(flat), "--depth", "h-adaptive"]) == 4


def test_simulate_outputs(tmp_path, capsys):
    rates = tmp_path / "r.csv"
    assert main(["simulate", "--scenario", "fig2-null", "--trials", "5", "--seed", "3",
                 "--methods", "joint-tp", "--rates-csv", str(rates), "--keep-tuples"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["trials"] == 5 and doc["config"]["methods"] == ["joint-tp"]
    assert len(doc["tuples"]) == 5
    assert "runtime" not in json.dumps(doc)
    assert rates.read_text().startswith("method,rejections,trials,rate,half_width")


def test_config_rerun_reproduces(tmp_path, capsys):
    assert main(["simulate", "--scenario", "thm2.1", "--trials", "4", "--seed", "1"]) == 0
    first = capsys.readouterr().out
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(json.loads(first)["config"]))
    assert main(["simulate", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out == first


def test_scatter(capsys):
    assert main(["scatter", "--scenario", "thm2.1", "--trials", "3", "--seed", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "ls_pq,ls_qp" and len(lines) == 4


def test_prep_drifter(tmp_path, capsys):
    raw = tmp_path / "raw.csv"
    rows = ["id,time,temperature"] + [
        f"d1,{np.datetime64('2019-01-01') + np.timedelta64(d, 'D')}T12:00:00Z,{d}" for d in range(365)]
    raw.write_text("\n".join(rows) + "\n")
    out = tmp_path / "c.csv"
    assert main(["prep-drifter", str(raw), "--year", "2019", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2
    assert main(["prep-drifter", str(raw), "--year", "2018"]) == 3


def _simulate_bytes(threads):
    env = dict(os.environ, DEPTHGATE_THREADS=str(threads))
    cmd = [sys.executable, "-m", "depthgate", "simulate", "--scenario", "fig2-null",
           "--trials", "30", "--seed", "7"]
    return subprocess.run(cmd, env=env, capture_output=True, check=True).stdout


def test_thread_count_does_not_change_output():
    assert _simulate_bytes(1) == _simulate_bytes(2)
