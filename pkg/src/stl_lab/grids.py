"""Frequency grids, one-third-octave band schemes, and STL curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ParseError, ValidationError

__all__ = [
    "FrequencyGrid",
    "BandScheme",
    "StlCurve",
    "default_grid",
    "default_bands",
    "third_octave_bands",
    "band_average",
    "stl_to_tau",
    "tau_to_stl",
]

# Edge ratio of a base-10 one-third-octave band: center * 10^(+-1/20).
_EDGE = 10.0 ** (1.0 / 20.0)


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing narrowband analysis frequencies in Hz."""

    frequencies: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        object.__setattr__(self, "frequencies", f)
        if f.ndim != 1 or f.size == 0:
            raise ValidationError("frequency grid must be a non-empty 1-D array")
        if not np.all(np.isfinite(f)) or f[0] <= 0.0:
            raise ValidationError("frequency grid values must be finite and > 0")
        if np.any(np.diff(f) <= 0.0):
            raise ValidationError("frequency grid must be strictly increasing")

    def __len__(self):
        return self.frequencies.size

    @property
    def omegas(self) -> np.ndarray:
        return 2.0 * np.pi * self.frequencies


@dataclass(frozen=True)
class BandScheme:
    """One-third-octave bands: center frequencies plus lower/upper edges in Hz."""

    centers: np.ndarray
    edges: np.ndarray = field(default=None)  # shape (n, 2); derived when omitted

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float)
        object.__setattr__(self, "centers", c)
        if c.ndim != 1 or c.size == 0 or np.any(c <= 0.0):
            raise ValidationError("band centers must be a non-empty positive 1-D array")
        if self.edges is None:
            e = np.column_stack([c / _EDGE, c * _EDGE])
        else:
            e = np.asarray(self.edges, dtype=float)
        object.__setattr__(self, "edges", e)
        if e.shape != (c.size, 2):
            raise ValidationError("band edges must have shape (n_bands, 2)")
        if np.any(e[:, 0] >= e[:, 1]) or np.any((c < e[:, 0]) | (c > e[:, 1])):
            raise ValidationError("each band center must lie inside its edges")
        # contiguous, non-overlapping
        if np.any(np.abs(e[1:, 0] - e[:-1, 1]) > 1e-9 * e[:-1, 1]):
            raise ValidationError("bands must be contiguous and non-overlapping")

    def __len__(self):
        return self.centers.size


@dataclass(frozen=True)
class StlCurve:
    """STL values (dB) on either a narrowband grid or a band scheme."""

    grid: FrequencyGrid | BandScheme
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (len(self.grid),):
            raise ValidationError(
                f"curve has {v.size} values for a grid of length {len(self.grid)}"
            )
        if not np.all(np.isfinite(v)):
            raise ValidationError("STL curve contains non-finite values")

    @property
    def frequencies(self) -> np.ndarray:
        if isinstance(self.grid, BandScheme):
            return self.grid.centers
        return self.grid.frequencies

    def write_csv(self, path) -> None:
        """Two-column CSV, full double precision, header mandatory."""
        label = "band_center_hz" if isinstance(self.grid, BandScheme) else "freq_hz"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{label},stl_db\n")
            for f, v in zip(self.frequencies, self.values):
                fh.write(f"{float(f)!r},{float(v)!r}\n")


def read_curve_csv(path) -> tuple[str, np.ndarray, np.ndarray]:
    """Read a curve CSV back as (frequency label, frequencies, values)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if len(header) != 2 or header[1] != "stl_db":
            raise ParseError(f"{path}: expected header '<freq>,stl_db', got {header!r}")
        freqs, vals = [], []
        for lineno, line in enumerate(fh, start=2):
            parts = line.strip().split(",")
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected 2 columns, got {len(parts)}")
            try:
                freqs.append(float(parts[0]))
                vals.append(float(parts[1]))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric value") from None
    return header[0], np.array(freqs), np.array(vals)


def default_grid(n: int = 128, f_lo: float = 50.0, f_hi: float = 2500.0) -> FrequencyGrid:
    """Default analysis grid: geometrically spaced frequencies, 50-2500 Hz."""
    return FrequencyGrid(np.geomspace(f_lo, f_hi, n))


def third_octave_bands(f_lo: float, f_hi: float) -> BandScheme:
    """Base-10 one-third-octave bands with exact centers 10^(n/10) covering [f_lo, f_hi]."""
    n_lo = int(np.ceil(round(10.0 * np.log10(f_lo), 9)))
    n_hi = int(np.floor(round(10.0 * np.log10(f_hi), 9)))
    if n_hi < n_lo:
        raise ValidationError(f"no one-third-octave centers between {f_lo} and {f_hi} Hz")
    centers = 10.0 ** (np.arange(n_lo, n_hi + 1) / 10.0)
    return BandScheme(centers)


def default_bands() -> BandScheme:
    """16 bands with nominal centers 63..2000 Hz (exact centers 10^(n/10))."""
    return third_octave_bands(63.0, 2000.0)


def tau_to_stl(tau: np.ndarray) -> np.ndarray:
    return -10.0 * np.log10(tau)


def stl_to_tau(stl: np.ndarray) -> np.ndarray:
    return 10.0 ** (-np.asarray(stl, dtype=float) / 10.0)


def band_average(curve: StlCurve, bands: BandScheme) -> StlCurve:
    """Energy-average a narrowband curve into one-third-octave bands.

    Transparencies (not dB values) are averaged inside each band:
    STL_band = -10 log10(mean of tau over in-band grid points).
    """
    if not isinstance(curve.grid, FrequencyGrid):
        raise ValidationError("band_average expects a curve on a narrowband FrequencyGrid")
    f = curve.grid.frequencies
    tau = stl_to_tau(curve.values)
    out = np.empty(len(bands))
    for i, (lo, hi) in enumerate(bands.edges):
        mask = (f >= lo) & (f < hi)
        if not mask.any():
            raise ConfigurationError(
                f"band {bands.centers[i]:.1f} Hz [{lo:.1f}, {hi:.1f}) contains no grid frequency"
            )
        out[i] = -10.0 * np.log10(tau[mask].mean())
    return StlCurve(bands, out)
