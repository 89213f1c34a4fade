"""Four regressor families behind one train/predict/persist contract.

Families and their defaults (seed-controlled, deterministic):

* nn  — 5x32 sigmoid MLP, Adam, batch 32, 1500 epochs (2500 for modal
        datasets), L2 1e-7; inputs standardized, outputs minmax [0, 1].
* gpr — c*Matern32 + RBF + white noise, L-BFGS-B with 10 restarts,
        shared kernel across outputs; same scaling as nn.
* rf  — 200 bootstrap CARTs, no depth limit.
* gbt — 125 depth-10 CARTs per output, learning rate 0.05.

Scaling is fitted only for the distance/gradient families (nn, gpr); the
tree families consume the augmented features and raw outputs directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ParseError, ValidationError
from ..preprocess import FeatureRecipe, Scaler, augment, table_to_si
from . import gpr as _gpr
from . import nn as _nn
from .trees import GradientBoosting, RandomForest

__all__ = [
    "FAMILIES",
    "RegressorSpec",
    "SurrogateModel",
    "default_spec",
    "train",
    "predict",
    "save_model",
    "load_model",
]

FAMILIES = ("nn", "gpr", "rf", "gbt")

FORMAT_VERSION = 1

_DEFAULTS = {
    "nn": dict(
        hidden_layers=5, hidden_units=32, l2=1e-7, batch_size=32, epochs=1500,
        learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8,
    ),
    "gpr": dict(n_restarts=10, maxiter=50),
    "rf": dict(n_trees=200, max_depth=None, bootstrap=True, min_leaf=1),
    "gbt": dict(n_trees=125, max_depth=10, learning_rate=0.05),
}


@dataclass(frozen=True)
class RegressorSpec:
    """Family, hyperparameters (defaults above), and the master seed."""

    family: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        unknown = set(self.params) - set(_DEFAULTS[self.family])
        if unknown:
            raise ValidationError(f"unknown {self.family} hyperparameters: {sorted(unknown)}")

    def resolved(self) -> dict:
        merged = dict(_DEFAULTS[self.family])
        merged.update(self.params)
        return merged


def default_spec(family: str, seed: int = 0, dataset_model: str | None = None) -> RegressorSpec:
    """Paper-default spec; NN trains 2500 epochs on modal-summation datasets."""
    params = {}
    if family == "nn" and dataset_model == "modal":
        params["epochs"] = 2500
    return RegressorSpec(family, seed, params)


@dataclass
class SurrogateModel:
    spec: RegressorSpec
    recipe: FeatureRecipe
    x_scaler: Scaler | None
    y_scaler: Scaler | None
    state: object
    n_outputs: int
    grid_meta: dict = field(default_factory=dict)

    def feature_names(self):
        return self.recipe.feature_names()


def _features(X_raw, recipe: FeatureRecipe) -> np.ndarray:
    X_raw = np.asarray(X_raw, dtype=np.float64)
    if X_raw.ndim != 2 or X_raw.shape[1] != 7:
        raise ValidationError(f"raw design matrix must be (n, 7), got {X_raw.shape}")
    return augment(table_to_si(X_raw), recipe)


def train(
    spec: RegressorSpec,
    X,
    Y,
    recipe: FeatureRecipe = FeatureRecipe("base"),
    grid_meta: dict | None = None,
) -> SurrogateModel:
    """Fit one surrogate on raw table-unit designs X (n, 7) and responses Y (n, F)."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if X.shape[0] != Y.shape[0]:
        raise ValidationError(f"X has {X.shape[0]} rows, Y has {Y.shape[0]}")
    if X.shape[0] < 2:
        raise ValidationError("training needs at least 2 samples")
    feats = _features(X, recipe)
    params = spec.resolved()

    x_scaler = y_scaler = None
    if spec.family in ("nn", "gpr"):
        x_scaler = Scaler.fit(feats, "standardize")
        y_scaler = Scaler.fit(Y, "minmax")
        xs, ys = x_scaler.apply(feats), y_scaler.apply(Y)
    else:
        xs, ys = feats, Y

    if spec.family == "nn":
        state = _nn.fit(xs, ys, seed=spec.seed, **params)
    elif spec.family == "gpr":
        state = _gpr.fit(xs, ys, seed=spec.seed, **params)
    elif spec.family == "rf":
        state = RandomForest(seed=spec.seed, **params).fit(xs, ys)
    else:
        state = GradientBoosting(seed=spec.seed, **params).fit(xs, ys)
    return SurrogateModel(
        spec=spec,
        recipe=recipe,
        x_scaler=x_scaler,
        y_scaler=y_scaler,
        state=state,
        n_outputs=Y.shape[1],
        grid_meta=dict(grid_meta or {}),
    )


def predict(model: SurrogateModel, X_new) -> np.ndarray:
    X_new = np.asarray(X_new, dtype=np.float64)
    if X_new.ndim != 2 or X_new.shape[1] != 7:
        raise ValidationError(f"predict expects raw (n, 7) designs, got {X_new.shape}")
    feats = _features(X_new, model.recipe)
    if model.x_scaler is not None:
        feats = model.x_scaler.apply(feats)
    if model.spec.family == "nn":
        ys = _nn.predict(model.state, feats)
    elif model.spec.family == "gpr":
        ys = _gpr.predict(model.state, feats)
    else:
        ys = model.state.predict(feats)
    if model.y_scaler is not None:
        ys = model.y_scaler.invert(ys)
    if not np.all(np.isfinite(ys)):
        raise ValidationError("prediction produced non-finite values")
    return ys


def save_model(model: SurrogateModel, path) -> None:
    """Versioned JSON artifact; floats keep full round-trip precision."""
    if model.spec.family == "nn":
        state = model.state.to_dict()
    elif model.spec.family == "gpr":
        state = model.state.to_dict()
    else:
        state = model.state.to_dict()
    doc = {
        "format_version": FORMAT_VERSION,
        "family": model.spec.family,
        "seed": model.spec.seed,
        "hyperparams": model.spec.params,
        "recipe": model.recipe.mode,
        "x_scaler": None if model.x_scaler is None else model.x_scaler.to_dict(),
        "y_scaler": None if model.y_scaler is None else model.y_scaler.to_dict(),
        "n_outputs": model.n_outputs,
        "grid_meta": model.grid_meta,
        "params": state,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> SurrogateModel:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid/truncated model JSON at line {exc.lineno}: {exc.msg}") from None
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValidationError(f"{path}: model format_version {version!r} != supported {FORMAT_VERSION}")
    family = doc.get("family")
    if family not in FAMILIES:
        raise ValidationError(f"{path}: unknown family tag {family!r}")
    spec = RegressorSpec(family, int(doc["seed"]), dict(doc.get("hyperparams", {})))
    if family == "nn":
        state = _nn.MlpParams.from_dict(doc["params"])
    elif family == "gpr":
        state = _gpr.GprState.from_dict(doc["params"])
    elif family == "rf":
        state = RandomForest.from_dict(doc["params"])
    else:
        state = GradientBoosting.from_dict(doc["params"])
    return SurrogateModel(
        spec=spec,
        recipe=FeatureRecipe(doc["recipe"]),
        x_scaler=None if doc["x_scaler"] is None else Scaler.from_dict(doc["x_scaler"]),
        y_scaler=None if doc["y_scaler"] is None else Scaler.from_dict(doc["y_scaler"]),
        state=state,
        n_outputs=int(doc["n_outputs"]),
        grid_meta=dict(doc.get("grid_meta", {})),
    )
