import math
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from stl_lab.dataset import Dataset
from stl_lab.errors import ValidationError
from stl_lab.evaluation import BenchmarkReport, benchmark, kfold_cv, kfold_folds, metrics
from stl_lab.preprocess import FeatureRecipe
from stl_lab.surrogates import RegressorSpec


def _dataset(n=60, n_out=4, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform([2000, 60, 0.25, 0.1, 5, 0.3, 0.3], [3000, 150, 0.35, 2.0, 7, 0.6, 0.6], size=(n, 7))
    y = np.column_stack([x[:, 0] / 500 + j + np.sin(x[:, 5] * 4) for j in range(n_out)])
    return Dataset(x, y, {"model": "infinite", "frequencies": [float(100 * (j + 1)) for j in range(n_out)]})


def test_metrics_zero_for_perfect_prediction():
    y = np.random.default_rng(0).random((5, 3))
    assert metrics(y, y) == (0.0, 0.0, 0.0)


def test_metrics_constant_offset():
    y = np.random.default_rng(0).random((5, 3))
    r, a, m = metrics(y, y + 0.75)
    assert r == pytest.approx(0.75)
    assert a == pytest.approx(0.75)
    assert m == pytest.approx(0.75)


def test_metrics_hand_values():
    y_true = np.zeros((2, 2))
    y_pred = np.array([[1.0, 3.0], [0.0, 2.0]])
    r, a, m = metrics(y_true, y_pred)
    assert r == pytest.approx(math.sqrt(3.5))
    assert a == pytest.approx(1.5)
    assert m == pytest.approx(2.5)


def test_metrics_ordering_properties():
    rng = np.random.default_rng(3)
    for _ in range(25):
        y = rng.normal(size=(8, 6))
        p = y + rng.normal(size=(8, 6))
        r, a, m = metrics(y, p)
        assert r >= a >= 0
        assert m >= a


def test_metrics_shape_mismatch():
    with pytest.raises(ValidationError):
        metrics(np.ones((2, 2)), np.ones((3, 2)))


def test_kfold_folds_partition():
    folds = kfold_folds(23, 5, seed=1)
    flat = np.concatenate(folds)
    assert sorted(flat.tolist()) == list(range(23))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1


def test_kfold_requires_enough_rows():
    with pytest.raises(ValidationError):
        kfold_folds(3, 5, seed=0)


def test_kfold_oracle_regressor_scores_zero():
    ds = _dataset()

    class Oracle:
        def __init__(self, ds):
            self.ds = ds

    def train_fn(spec, x, y, recipe, meta):
        return (ds, None)

    def predict_fn(model, x_new):
        full_ds = model[0]
        idx = [int(np.flatnonzero((full_ds.X == row).all(axis=1))[0]) for row in x_new]
        return full_ds.Y[idx]

    rep = kfold_cv(ds, RegressorSpec("rf"), FeatureRecipe("base"), k=5, seed=0,
                   train_fn=train_fn, predict_fn=predict_fn)
    assert rep.rmse_mean == rep.rmse_std == 0.0
    assert rep.mae_mean == rep.mme_mean == 0.0


def test_kfold_deterministic():
    ds = _dataset()
    spec = RegressorSpec("rf", seed=3, params={"n_trees": 5})
    r1 = kfold_cv(ds, spec, FeatureRecipe("base"), k=4, seed=9)
    r2 = kfold_cv(ds, spec, FeatureRecipe("base"), k=4, seed=9)
    assert r1.rmse_mean == r2.rmse_mean
    assert r1.mme_std == r2.mme_std


def test_benchmark_cross_product_and_failure_capture():
    ds = _dataset(40)
    report = benchmark(
        {"toy": ds},
        families=["rf", "gbt"],
        recipes=["base", "physics"],
        sizes=[20, 500],  # 500 exceeds n -> skipped cell
        k=3,
        seed=2,
        spec_factory=lambda fam, seed, model: RegressorSpec(
            fam, seed, {"n_trees": 3} if fam == "rf" else {"n_trees": 3, "max_depth": 3}
        ),
    )
    ok = [c for c in report.cells if c["status"] == "ok"]
    skipped = [c for c in report.cells if c["status"] == "skipped"]
    assert len(ok) == 4 and len(skipped) == 1
    for cell in ok:
        assert cell["report"]["rmse_mean"] >= cell["report"]["mae_mean"] >= 0


def test_benchmark_cells_independent():
    ds = _dataset(30)
    factory = lambda fam, seed, model: RegressorSpec(fam, seed, {"n_trees": 3})
    both = benchmark({"toy": ds}, ["rf", "gbt"], ["base"], [30], k=3, seed=5,
                     spec_factory=lambda f, s, m: RegressorSpec(
                         f, s, {"n_trees": 3} if f == "rf" else {"n_trees": 3, "max_depth": 2}))
    only_rf = benchmark({"toy": ds}, ["rf"], ["base"], [30], k=3, seed=5, spec_factory=factory)
    rf_cell_both = [c for c in both.cells if c["family"] == "rf"][0]
    rf_cell_only = only_rf.cells[0]
    a = {k: v for k, v in rf_cell_both["report"].items() if k != "train_s"}
    b = {k: v for k, v in rf_cell_only["report"].items() if k != "train_s"}
    assert a == b


def test_benchmark_report_serialization(tmp_path):
    ds = _dataset(30)
    report = benchmark({"toy": ds}, ["rf"], ["base"], [30], k=3, seed=5,
                       spec_factory=lambda f, s, m: RegressorSpec(f, s, {"n_trees": 3}))
    jpath, cpath = tmp_path / "r.json", tmp_path / "r.csv"
    report.to_json(jpath)
    report.to_csv(cpath)
    lines = cpath.read_text().splitlines()
    assert lines[0].startswith("model,family,recipe,n,rmse_mean")
    assert len(lines) == 2
    import json

    assert json.loads(jpath.read_text())["cells"][0]["status"] == "ok"


@pytest.mark.slow
def test_gpr_training_time_grows_with_n():
    # O(N^3) solve: rank correlation of mean train time vs size > 0.9
    ds = _dataset(1000, n_out=4, seed=7)
    sizes = [100, 250, 500, 1000]
    spec = RegressorSpec("gpr", seed=0, params={"n_restarts": 1, "maxiter": 15})
    mean_times = []
    for n in sizes:
        sub = Dataset(ds.X[:n], ds.Y[:n], dict(ds.meta))
        times = []
        for rep in range(3):
            r = kfold_cv(sub, spec, FeatureRecipe("base"), k=2, seed=rep)
            times.append(r.train_s)
        mean_times.append(np.mean(times))
    rho, _ = spearmanr(sizes, mean_times)
    assert rho > 0.9
