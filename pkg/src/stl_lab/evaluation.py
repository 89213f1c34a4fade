"""Error metrics, k-fold cross-validation, and the benchmark harness."""

from __future__ import annotations

import json
import time
import traceback
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import ValidationError
from .preprocess import FeatureRecipe
from .surrogates import RegressorSpec, predict as surrogate_predict, train as surrogate_train

__all__ = [
    "metrics",
    "MetricsReport",
    "kfold_cv",
    "per_frequency_rf_cv",
    "BenchmarkReport",
    "benchmark",
]


def metrics(y_true, y_pred) -> tuple[float, float, float]:
    """(rmse, mae, mme) over an (n_designs, n_frequencies) error matrix.

    mme is the mean over designs of the per-design maximum absolute error.
    """
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape:
        raise ValidationError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.ndim == 1:
        y_true = y_true.reshape(-1, 1)
        y_pred = y_pred.reshape(-1, 1)
    err = y_pred - y_true
    rmse = float(np.sqrt(np.mean(err**2)))
    mae = float(np.mean(np.abs(err)))
    mme = float(np.mean(np.max(np.abs(err), axis=1)))
    return rmse, mae, mme


@dataclass
class MetricsReport:
    """Cross-validated errors (dB), mean +- std over folds, plus train timing."""

    rmse_mean: float
    rmse_std: float
    mae_mean: float
    mae_std: float
    mme_mean: float
    mme_std: float
    train_s: float
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rmse_mean < 0 or self.mae_mean < 0:
            raise ValidationError("negative error metric")

    def to_dict(self) -> dict:
        return {
            "rmse_mean": self.rmse_mean, "rmse_std": self.rmse_std,
            "mae_mean": self.mae_mean, "mae_std": self.mae_std,
            "mme_mean": self.mme_mean, "mme_std": self.mme_std,
            "train_s": self.train_s, "config": self.config,
        }


def kfold_folds(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle, k disjoint folds covering all row indices."""
    if k < 2:
        raise ValidationError(f"k must be >= 2, got {k}")
    if n < k:
        raise ValidationError(f"need at least k={k} rows, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence([0xCF0, int(seed)]))
    perm = rng.permutation(n)
    return [fold.copy() for fold in np.array_split(perm, k)]


def kfold_cv(
    dataset: Dataset,
    spec: RegressorSpec,
    recipe: FeatureRecipe = FeatureRecipe("base"),
    k: int = 5,
    seed: int = 0,
    train_fn=None,
    predict_fn=None,
) -> MetricsReport:
    """k-fold cross-validation of one surrogate configuration.

    train_fn/predict_fn default to the surrogate module and exist so tests
    can inject oracle regressors.
    """
    train_fn = train_fn or surrogate_train
    predict_fn = predict_fn or surrogate_predict
    folds = kfold_folds(dataset.n, k, seed)
    all_idx = np.arange(dataset.n)
    rmses, maes, mmes, times = [], [], [], []
    for fold in folds:
        train_mask = np.ones(dataset.n, dtype=bool)
        train_mask[fold] = False
        tr = all_idx[train_mask]
        t0 = time.perf_counter()
        model = train_fn(spec, dataset.X[tr], dataset.Y[tr], recipe, dataset.meta)
        times.append(time.perf_counter() - t0)
        pred = predict_fn(model, dataset.X[fold])
        r, a, m = metrics(dataset.Y[fold], pred)
        rmses.append(r)
        maes.append(a)
        mmes.append(m)
    return MetricsReport(
        rmse_mean=float(np.mean(rmses)), rmse_std=float(np.std(rmses)),
        mae_mean=float(np.mean(maes)), mae_std=float(np.std(maes)),
        mme_mean=float(np.mean(mmes)), mme_std=float(np.std(mmes)),
        train_s=float(np.mean(times)),
        config={
            "family": spec.family, "recipe": recipe.mode, "n": int(dataset.n),
            "k": int(k), "seed": int(seed), "model": dataset.meta.get("model"),
        },
    )


def per_frequency_rf_cv(
    dataset: Dataset,
    recipe: FeatureRecipe = FeatureRecipe("base"),
    k: int = 5,
    seed: int = 0,
    n_trees: int = 200,
) -> MetricsReport:
    """Cross-validate the per-frequency random-forest configuration.

    One single-output forest (n_trees, no depth limit) is fitted per output
    frequency, the multi-output-regressor structure used for the
    sensitivity maps. Fold metrics are computed on the assembled
    (n_designs x n_frequencies) prediction matrix.
    """
    from .preprocess import augment, table_to_si
    from .surrogates.trees import RandomForest

    feats = augment(table_to_si(dataset.X), recipe)
    folds = kfold_folds(dataset.n, k, seed)
    all_idx = np.arange(dataset.n)
    rmses, maes, mmes, times = [], [], [], []
    for fi, fold in enumerate(folds):
        train_mask = np.ones(dataset.n, dtype=bool)
        train_mask[fold] = False
        tr = all_idx[train_mask]
        pred = np.empty((fold.size, dataset.Y.shape[1]))
        t0 = time.perf_counter()
        for j in range(dataset.Y.shape[1]):
            rf_seed = int(np.random.SeedSequence([0xF0F, int(seed), fi, j]).generate_state(1)[0])
            rf = RandomForest(n_trees=n_trees, max_depth=None, seed=rf_seed)
            rf.fit(feats[tr], dataset.Y[tr, j])
            pred[:, j] = rf.predict(feats[fold])[:, 0]
        times.append(time.perf_counter() - t0)
        r, a, m = metrics(dataset.Y[fold], pred)
        rmses.append(r)
        maes.append(a)
        mmes.append(m)
    return MetricsReport(
        rmse_mean=float(np.mean(rmses)), rmse_std=float(np.std(rmses)),
        mae_mean=float(np.mean(maes)), mae_std=float(np.std(maes)),
        mme_mean=float(np.mean(mmes)), mme_std=float(np.std(mmes)),
        train_s=float(np.mean(times)),
        config={
            "family": "rf_per_frequency", "recipe": recipe.mode, "n": int(dataset.n),
            "k": int(k), "seed": int(seed), "model": dataset.meta.get("model"),
        },
    )


@dataclass
class BenchmarkReport:
    """Cross product {dataset} x {family} x {recipe} x {size} of CV reports."""

    cells: list = field(default_factory=list)

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump({"cells": self.cells}, fh, indent=1, sort_keys=True)
            fh.write("\n")

    def to_csv(self, path) -> None:
        cols = ("model", "family", "recipe", "n", "rmse_mean", "rmse_std",
                "mae_mean", "mae_std", "mme_mean", "mme_std", "train_s")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for cell in self.cells:
                if cell.get("status") != "ok":
                    continue
                rep = cell["report"]
                row = [str(cell["model"]), cell["family"], cell["recipe"], str(cell["n"])]
                row += [repr(rep[key]) for key in cols[4:]]
                fh.write(",".join(row) + "\n")


def benchmark(
    datasets: dict[str, Dataset],
    families,
    recipes,
    sizes,
    k: int = 5,
    seed: int = 0,
    spec_factory=None,
) -> BenchmarkReport:
    """Run the full cross product; cell failures are recorded, the run continues.

    Sizes subset each dataset as its first n LHS rows (generation order).
    spec_factory(family, seed, dataset_model) -> RegressorSpec allows
    hyperparameter overrides; defaults to paper settings.
    """
    from .surrogates import default_spec

    spec_factory = spec_factory or default_spec
    report = BenchmarkReport()
    for ds_name, ds in datasets.items():
        for n in sizes:
            if n > ds.n:
                report.cells.append({
                    "model": ds_name, "family": None, "recipe": None, "n": int(n),
                    "status": "skipped", "reason": f"dataset has only {ds.n} rows",
                })
                continue
            sub = Dataset(ds.X[:n].copy(), ds.Y[:n].copy(), dict(ds.meta))
            for family in families:
                for recipe_mode in recipes:
                    cell = {
                        "model": ds_name, "family": family,
                        "recipe": recipe_mode, "n": int(n),
                    }
                    try:
                        spec = spec_factory(family, seed, ds.meta.get("model"))
                        rep = kfold_cv(sub, spec, FeatureRecipe(recipe_mode), k=k, seed=seed)
                        cell["status"] = "ok"
                        cell["report"] = rep.to_dict()
                    except Exception as exc:
                        cell["status"] = "failed"
                        cell["reason"] = f"{type(exc).__name__}: {exc}"
                        cell["trace"] = traceback.format_exc(limit=4)
                    report.cells.append(cell)
    return report
