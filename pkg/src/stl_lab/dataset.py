"""Design spaces, Latin Hypercube Sampling, and dataset generation/persistence.

Design matrices live in the table units of the design-space files
(rho kg/m^3, E GPa, nu -, eta %, h mm, a m, b m); SI conversion happens
inside the preprocessing/feature layer and at PlateSpec construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .grids import BandScheme, FrequencyGrid, band_average, default_grid
from .modal import ModalTruncation
from .plate import AIR, FluidSpec, PlateSpec
from .quadrature import QuadratureScheme
from .simulate import stl_curve

__all__ = [
    "VARIABLES",
    "DesignSpace",
    "Dataset",
    "lhs_sample",
    "plate_from_row",
    "generate_dataset",
    "save_dataset",
    "load_dataset",
    "table1_space",
]

#: Canonical design-variable order; also the dataset CSV column order.
VARIABLES = ("rho", "E", "nu", "eta", "h", "a", "b")

#: Keys used by design-space JSON files, same order as VARIABLES.
SPACE_KEYS = ("rho", "E_gpa", "nu", "eta_percent", "h_mm", "a", "b")

GENERATOR_VERSION = 1


@dataclass(frozen=True)
class DesignSpace:
    """Per-variable lower/upper bounds, table units; shape (7, 2)."""

    bounds: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bounds, dtype=float)
        object.__setattr__(self, "bounds", b)
        if b.shape != (len(VARIABLES), 2):
            raise ValidationError(f"design space must have shape (7, 2), got {b.shape}")
        if not np.all(np.isfinite(b)):
            raise ValidationError("design space bounds must be finite")
        for name, (lo, hi) in zip(VARIABLES, b):
            if lo >= hi:
                raise ValidationError(f"design space variable '{name}': lower {lo} >= upper {hi}")
        # both corners must yield valid plates
        plate_from_row(b[:, 0])
        plate_from_row(b[:, 1])

    @classmethod
    def from_dict(cls, doc: dict) -> "DesignSpace":
        missing = [k for k in SPACE_KEYS if k not in doc]
        if missing:
            raise ParseError(f"design space missing keys: {', '.join(missing)}")
        rows = []
        for key in SPACE_KEYS:
            pair = doc[key]
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ParseError(f"design space key '{key}' must be a [lower, upper] pair")
            rows.append([float(pair[0]), float(pair[1])])
        return cls(np.array(rows))

    @classmethod
    def from_json(cls, path) -> "DesignSpace":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {k: [float(lo), float(hi)] for k, (lo, hi) in zip(SPACE_KEYS, self.bounds)}


def table1_space() -> DesignSpace:
    """The packaged reference design space (also shipped as spaces/table1.json)."""
    text = resources.files("stl_lab").joinpath("spaces/table1.json").read_text()
    return DesignSpace.from_dict(json.loads(text))


def lhs_sample(space: DesignSpace, n: int, seed: int) -> np.ndarray:
    """Latin hypercube: one sample in each of n equal strata per dimension.

    Per dimension an independent stratum permutation and an independent
    uniform jitter are drawn from a seeded generator, so identical
    (space, n, seed) give bit-identical matrices.
    """
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence([0x5717AB, int(seed)]))
    out = np.empty((n, len(VARIABLES)))
    for j, (lo, hi) in enumerate(space.bounds):
        perm = rng.permutation(n)
        jitter = rng.random(n)
        out[:, j] = lo + (perm + jitter) / n * (hi - lo)
    return out


def plate_from_row(row) -> PlateSpec:
    """PlateSpec (SI) from one design row in table units."""
    rho, e_gpa, nu, eta_pct, h_mm, a, b = (float(v) for v in row)
    return PlateSpec(rho=rho, E=e_gpa * 1e9, nu=nu, eta=eta_pct / 100.0, h=h_mm / 1000.0, a=a, b=b)


@dataclass
class Dataset:
    """Design matrix X (table units) with STL responses Y (dB) and metadata."""

    X: np.ndarray
    Y: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.Y = np.asarray(self.Y, dtype=float)
        if self.X.ndim != 2 or self.X.shape[1] != len(VARIABLES):
            raise ValidationError(f"X must be (n, 7), got {self.X.shape}")
        if self.Y.ndim != 2 or self.Y.shape[0] != self.X.shape[0]:
            raise ValidationError(
                f"X and Y row counts differ: {self.X.shape[0]} vs {self.Y.shape[0]}"
            )
        if not np.all(np.isfinite(self.X)):
            raise ValidationError("X contains non-finite entries")
        if not np.all(np.isfinite(self.Y)):
            raise ValidationError("Y contains non-finite entries")
        freqs = self.meta.get("frequencies")
        if freqs is not None and len(freqs) != self.Y.shape[1]:
            raise ValidationError(
                f"meta lists {len(freqs)} frequencies but Y has {self.Y.shape[1]} columns"
            )

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def frequencies(self) -> np.ndarray:
        return np.asarray(self.meta["frequencies"], dtype=float)


def generate_dataset(
    model: str,
    space: DesignSpace,
    n: int,
    seed: int,
    grid: FrequencyGrid | None = None,
    bands: BandScheme | None = None,
    quad: QuadratureScheme = QuadratureScheme(),
    trunc: ModalTruncation | None = None,
    fluid: FluidSpec = AIR,
) -> Dataset:
    """LHS designs paired with simulated STL curves (band-averaged if bands given)."""
    grid = grid or default_grid()
    x = lhs_sample(space, n, seed)
    n_out = len(bands) if bands is not None else len(grid)
    y = np.empty((n, n_out))
    for i in range(n):
        try:
            plate = plate_from_row(x[i])
            curve = stl_curve(model, plate, fluid, grid, quad, trunc)
            if bands is not None:
                curve = band_average(curve, bands)
            y[i] = curve.values
        except Exception as exc:
            design = {k: float(v) for k, v in zip(VARIABLES, x[i])}
            raise type(exc)(f"simulator failed on design row {i} {design}: {exc}") from exc
    meta = {
        "generator_version": GENERATOR_VERSION,
        "model": model,
        "n": int(n),
        "seed": int(seed),
        "space": space.to_dict(),
        "grid": [float(f) for f in grid.frequencies],
        "banded": bands is not None,
        "frequencies": [float(f) for f in (bands.centers if bands is not None else grid.frequencies)],
        "band_edges": [[float(e[0]), float(e[1])] for e in bands.edges] if bands is not None else None,
        "quad": {"n_theta": quad.n_theta, "n_phi": quad.n_phi, "theta_max": quad.theta_max},
        "trunc": None
        if trunc is None and model != "modal"
        else {
            "max_m": (trunc or ModalTruncation()).max_m,
            "max_n": (trunc or ModalTruncation()).max_n,
            "freq_factor": (trunc or ModalTruncation()).freq_factor,
        },
        "fluid": {"rho0": fluid.rho0, "c0": fluid.c0},
    }
    return Dataset(x, y, meta)


def _column_labels(meta: dict) -> list[str]:
    freqs = meta["frequencies"]
    return list(VARIABLES) + [f"STL@{float(f)!r}" for f in freqs]


def save_dataset(ds: Dataset, path) -> None:
    """CSV with header rho,E,nu,eta,h,a,b,STL@f1,... plus a .meta.json sidecar."""
    path = Path(path)
    labels = _column_labels(ds.meta)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(labels) + "\n")
        for xi, yi in zip(ds.X, ds.Y):
            fh.write(",".join(repr(float(v)) for v in xi) + ",")
            fh.write(",".join(repr(float(v)) for v in yi) + "\n")
    meta_path = path.with_suffix(path.suffix + ".meta.json") if path.suffix != ".csv" else path.with_name(path.stem + ".meta.json")
    with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(ds.meta, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _meta_path_for(path: Path) -> Path:
    return path.with_name(path.stem + ".meta.json") if path.suffix == ".csv" else path.with_suffix(path.suffix + ".meta.json")


def load_dataset(path) -> Dataset:
    path = Path(path)
    meta_path = _meta_path_for(path)
    if not meta_path.exists():
        raise ParseError(f"missing dataset sidecar {meta_path}")
    with open(meta_path, "r", encoding="utf-8") as fh:
        try:
            meta = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{meta_path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        expected = _column_labels(meta)
        if len(header) != len(expected):
            raise ParseError(
                f"{path}: header has {len(header)} columns, meta expects {len(expected)}"
            )
        if header[: len(VARIABLES)] != list(VARIABLES):
            raise ParseError(f"{path}: design columns must be {','.join(VARIABLES)}")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(expected):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(expected)} columns, got {len(parts)}"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric cell ({exc})") from None
    data = np.array(rows) if rows else np.empty((0, len(expected)))
    x, y = data[:, : len(VARIABLES)], data[:, len(VARIABLES) :]
    for i, j in zip(*np.nonzero(~np.isfinite(data))):
        raise ValidationError(f"{path}: non-finite value at data row {i + 1}, column '{expected[j]}'")
    return Dataset(x, y, meta)
