"""Feature scaling and physics-guided feature augmentation.

All feature computation happens in SI units; design matrices arrive in
table units (E GPa, eta %, h mm) and are converted once at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = ["RECIPES", "FeatureRecipe", "table_to_si", "augment", "Scaler"]

RECIPES = ("base", "physics", "physics_r")

_RAW = ("rho", "E", "nu", "eta", "h", "a", "b")


@dataclass(frozen=True)
class FeatureRecipe:
    """Feature set: 7 raw variables, optionally followed by m, D_R (and R)."""

    mode: str = "base"

    def __post_init__(self):
        if self.mode not in RECIPES:
            raise ValidationError(f"unknown recipe {self.mode!r}; expected one of {RECIPES}")

    def feature_names(self) -> list[str]:
        names = list(_RAW)
        if self.mode in ("physics", "physics_r"):
            names += ["m", "D_R"]
        if self.mode == "physics_r":
            names.append("R")
        return names


def table_to_si(x_table: np.ndarray) -> np.ndarray:
    """Convert a design matrix from table units to SI (E Pa, eta fraction, h m)."""
    x = np.array(x_table, dtype=float)
    if x.ndim != 2 or x.shape[1] != 7:
        raise ValidationError(f"design matrix must be (n, 7), got {x.shape}")
    x[:, 1] *= 1e9
    x[:, 3] /= 100.0
    x[:, 4] /= 1000.0
    return x


def augment(x_si: np.ndarray, recipe: FeatureRecipe) -> np.ndarray:
    """Append the physics-guided features to an SI design matrix.

    m = rho*h, D_R = E h^3/(12(1-nu^2)), R = D_R/(m a^4 b^4); raw columns
    pass through unchanged, row-wise pure.
    """
    x = np.asarray(x_si, dtype=float)
    if x.ndim != 2 or x.shape[1] != 7:
        raise ValidationError(f"augment expects a (n, 7) SI matrix, got {x.shape}")
    if recipe.mode == "base":
        return x.copy()
    rho, e, nu, _, h, a, b = (x[:, j] for j in range(7))
    m = rho * h
    d_r = e * h**3 / (12.0 * (1.0 - nu**2))
    cols = [x, m[:, None], d_r[:, None]]
    if recipe.mode == "physics_r":
        r = d_r / (m * a**4 * b**4)
        cols.append(r[:, None])
    return np.hstack(cols)


@dataclass
class Scaler:
    """Per-column affine scaler: 'standardize' (mean 0, population std 1) or
    'minmax' (fit range mapped to [0, 1]). apply/invert are exact inverses;
    out-of-fit data is never clipped."""

    kind: str
    shift: np.ndarray = None
    scale: np.ndarray = None

    @classmethod
    def fit(cls, x: np.ndarray, kind: str) -> "Scaler":
        if kind not in ("standardize", "minmax"):
            raise ValidationError(f"unknown scaler kind {kind!r}")
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[0] < 2:
            raise ValidationError("scaler fit needs a 2-D matrix with >= 2 rows")
        if kind == "standardize":
            shift = x.mean(axis=0)
            scale = x.std(axis=0)
        else:
            shift = x.min(axis=0)
            scale = x.max(axis=0) - shift
        bad = np.nonzero(scale <= 0.0)[0]
        if bad.size:
            raise ValidationError(f"constant column(s) {bad.tolist()} cannot be scaled")
        return cls(kind=kind, shift=shift, scale=scale)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.shift) / self.scale

    def invert(self, x_scaled: np.ndarray) -> np.ndarray:
        return np.asarray(x_scaled, dtype=float) * self.scale + self.shift

    def to_dict(self) -> dict:
        return {"kind": self.kind, "shift": self.shift.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "Scaler":
        return cls(kind=doc["kind"], shift=np.array(doc["shift"]), scale=np.array(doc["scale"]))
