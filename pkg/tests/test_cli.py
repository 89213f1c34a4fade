import json
import subprocess
import sys
from pathlib import Path

import pytest

SPACE = str(Path(__file__).resolve().parents[1] / "spaces" / "table1.json")

PLATE = {"rho": 2500, "E": 105, "nu": 0.3, "eta_percent": 1.05, "h_mm": 6, "a": 0.45, "b": 0.45}


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "stl_lab", *map(str, args)],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "plate.json").write_text(json.dumps(PLATE))
    return d


def test_help_exits_zero_everywhere():
    assert run_cli("--help").returncode == 0
    for sub in ("simulate", "sample", "train", "predict", "benchmark", "sensitivity"):
        r = run_cli(sub, "--help")
        assert r.returncode == 0
        assert "--seed" in r.stdout
        assert "--threads" in r.stdout


def test_unknown_flag_exits_one():
    r = run_cli("simulate", "--bogus")
    assert r.returncode == 1
    assert "usage" in r.stderr.lower()


def test_missing_file_exits_one(workdir):
    r = run_cli("simulate", "--model", "infinite", "--plate", workdir / "nope.json",
                "--out", workdir / "x.csv")
    assert r.returncode == 1
    assert "not found" in r.stderr


def test_simulate_writes_curve(workdir):
    out = workdir / "curve.csv"
    r = run_cli("simulate", "--model", "infinite", "--plate", workdir / "plate.json",
                "--out", out, "--grid-n", 32)
    assert r.returncode == 0, r.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "freq_hz,stl_db"
    assert len(lines) == 33


def test_full_pipeline_and_thread_count_determinism(workdir):
    ds = workdir / "ds.csv"
    args = ("sample", "--space", SPACE, "--model", "infinite", "--n", 16, "--seed", 42,
            "--grid-n", 12, "--n-theta", 16, "--n-phi", 4, "--out", ds)
    assert run_cli(*args).returncode == 0
    first = ds.read_bytes(), (workdir / "ds.meta.json").read_bytes()
    assert run_cli(*args, "--threads", 4).returncode == 0
    assert (ds.read_bytes(), (workdir / "ds.meta.json").read_bytes()) == first

    model = workdir / "m.json"
    targs = ("train", "--data", ds, "--family", "gbt", "--recipe", "physics", "--seed", 7,
             "--out", model)
    assert run_cli(*targs).returncode == 0, run_cli(*targs).stderr
    m1 = model.read_bytes()
    assert run_cli(*targs, "--threads", 3).returncode == 0
    assert model.read_bytes() == m1

    pred = workdir / "p.csv"
    pargs = ("predict", "--model", model, "--data", ds, "--out", pred)
    assert run_cli(*pargs).returncode == 0
    p1 = pred.read_bytes()
    assert run_cli(*pargs, "--threads", 2).returncode == 0
    assert pred.read_bytes() == p1

    smap = workdir / "map.csv"
    sargs = ("sensitivity", "--data", ds, "--recipe", "base", "--trees", 10, "--seed", 2,
             "--out", smap)
    assert run_cli(*sargs).returncode == 0
    s1 = smap.read_bytes()
    assert run_cli(*sargs, "--threads", 4).returncode == 0
    assert smap.read_bytes() == s1

    rep = workdir / "bench.json"
    repc = workdir / "bench.csv"
    bargs = ("benchmark", "--data", ds, "--families", "rf,gbt", "--recipes", "base",
             "--sizes", "16", "--cv", 2, "--seed", 5, "--report", rep, "--csv", repc)
    assert run_cli(*bargs).returncode == 0
    # timing varies run to run; everything else must be identical
    doc1 = json.loads(rep.read_text())
    csv1 = repc.read_text()
    assert run_cli(*bargs, "--threads", 2).returncode == 0
    doc2 = json.loads(rep.read_text())

    def strip(doc):
        for cell in doc["cells"]:
            cell.get("report", {}).pop("train_s", None)
        return doc

    assert strip(doc1) == strip(doc2)
    assert len(csv1.splitlines()) == 3


def test_simulate_curve_deterministic_bytes(workdir):
    out1, out2 = workdir / "c1.csv", workdir / "c2.csv"
    base = ("simulate", "--model", "modal", "--plate", workdir / "plate.json",
            "--grid-n", 64, "--n-theta", 8, "--n-phi", 4, "--bands")
    assert run_cli(*base, "--out", out1).returncode == 0
    assert run_cli(*base, "--out", out2, "--threads", 8).returncode == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sample_rejects_malformed_space(workdir):
    bad = workdir / "bad.json"
    bad.write_text('{"rho": [2000, 3000]}')
    r = run_cli("sample", "--space", bad, "--model", "infinite", "--n", 4,
                "--out", workdir / "x.csv")
    assert r.returncode == 1
    assert "missing keys" in r.stderr
