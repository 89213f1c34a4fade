"""Per-frequency MDI sensitivity maps from single-output random forests."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ValidationError
from .preprocess import FeatureRecipe, augment, table_to_si
from .surrogates.trees import RandomForest

__all__ = ["ImportanceMap", "mdi_importances", "importance_map"]


def mdi_importances(rf: RandomForest) -> tuple[np.ndarray, bool]:
    """Normalised Mean Decrease in Impurity per feature.

    Returns (importances summing to 1, degenerate_flag). A forest with no
    splits at all (constant target) has no impurity decreases; it yields a
    uniform vector with the flag set and a RuntimeWarning.
    """
    raw = rf.raw_importances()
    total = float(raw.sum())
    if total <= 0.0:
        warnings.warn("random forest contains no splits; returning uniform importances", RuntimeWarning)
        return np.full(raw.size, 1.0 / raw.size), True
    return raw / total, False


@dataclass
class ImportanceMap:
    """|features| x |frequencies| matrix of column-normalised importances."""

    features: list[str]
    frequencies: np.ndarray
    values: np.ndarray
    degenerate: np.ndarray = None  # per-frequency flag: uniform fallback used

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.features), self.frequencies.size):
            raise ValidationError(
                f"importance map shape {self.values.shape} != "
                f"({len(self.features)}, {self.frequencies.size})"
            )
        if self.degenerate is None:
            self.degenerate = np.zeros(self.frequencies.size, dtype=bool)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("feature," + ",".join(f"imp@{float(f)!r}" for f in self.frequencies) + "\n")
            for name, row in zip(self.features, self.values):
                fh.write(name + "," + ",".join(repr(float(v)) for v in row) + "\n")


def importance_map(
    dataset: Dataset,
    recipe: FeatureRecipe = FeatureRecipe("base"),
    n_trees: int = 200,
    max_depth=None,
    seed: int = 0,
) -> ImportanceMap:
    """One single-output RF per frequency column; MDI vectors per column.

    Columns are processed in index order; each per-frequency forest derives
    its seed from (seed, column), so the map is deterministic.
    """
    feats = augment(table_to_si(dataset.X), recipe)
    names = recipe.feature_names()
    freqs = dataset.frequencies
    values = np.empty((len(names), freqs.size))
    degenerate = np.zeros(freqs.size, dtype=bool)
    for j in range(freqs.size):
        rf = RandomForest(
            n_trees=n_trees,
            max_depth=max_depth,
            bootstrap=True,
            seed=int(np.random.SeedSequence([0x5E45, int(seed), j]).generate_state(1)[0]),
        ).fit(feats, dataset.Y[:, j])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            imp, flag = mdi_importances(rf)
        values[:, j] = imp
        degenerate[j] = flag
    return ImportanceMap(names, freqs, values, degenerate)
