"""Plate/fluid value types and closed-form derived quantities.

All quantities are SI internally. File ingestion accepts the table units
used by design-space files (E in GPa, eta in percent, h in mm) and
converts on the way in.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

from .errors import ParseError, ValidationError

__all__ = [
    "PlateSpec",
    "FluidSpec",
    "WaveIncidence",
    "AIR",
    "bending_stiffness",
    "surface_mass_density",
    "resonance_coefficient",
    "critical_frequency",
    "coincidence_frequency",
    "natural_frequency",
    "plate_from_json",
    "fluid_from_json",
]


@dataclass(frozen=True)
class PlateSpec:
    """Isotropic rectangular plate: material and geometry.

    rho  mass density (kg/m^3)
    E    elastic modulus (Pa)
    nu   Poisson's ratio
    eta  damping loss factor, stored as a fraction (0.01 == 1 %)
    h    thickness (m)
    a    width (m)
    b    length (m)
    """

    rho: float
    E: float
    nu: float
    eta: float
    h: float
    a: float
    b: float

    def __post_init__(self):
        for name in ("rho", "E", "h", "a", "b"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValidationError(f"plate field '{name}' must be finite and > 0, got {value!r}")
        if not (0.0 <= self.nu < 0.5):
            raise ValidationError(f"plate field 'nu' must satisfy 0 <= nu < 0.5, got {self.nu!r}")
        if not math.isfinite(self.eta) or self.eta < 0.0:
            raise ValidationError(f"plate field 'eta' must be >= 0, got {self.eta!r}")

    @property
    def surface(self) -> float:
        return self.a * self.b


@dataclass(frozen=True)
class FluidSpec:
    """Ambient fluid: density (kg/m^3) and sound speed (m/s)."""

    rho0: float
    c0: float

    def __post_init__(self):
        for name in ("rho0", "c0"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValidationError(f"fluid field '{name}' must be finite and > 0, got {value!r}")


#: Air at 20 degC; the default fluid everywhere.
AIR = FluidSpec(rho0=1.21, c0=343.0)


@dataclass(frozen=True)
class WaveIncidence:
    """One incident plane wave: polar angle theta, azimuth phi, angular frequency omega."""

    theta: float
    phi: float
    omega: float

    def __post_init__(self):
        if not (0.0 <= self.theta < math.pi / 2):
            raise ValidationError(f"incidence 'theta' must lie in [0, pi/2), got {self.theta!r}")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise ValidationError(f"incidence 'phi' must lie in [0, 2*pi), got {self.phi!r}")
        if not math.isfinite(self.omega) or self.omega <= 0.0:
            raise ValidationError(f"incidence 'omega' must be > 0, got {self.omega!r}")

    def wavenumbers(self, fluid: FluidSpec) -> tuple[float, float, float]:
        """Components (kx, ky, kz) of the acoustic wave vector in the given fluid."""
        k = self.omega / fluid.c0
        st = math.sin(self.theta)
        return (
            k * st * math.cos(self.phi),
            k * st * math.sin(self.phi),
            k * math.cos(self.theta),
        )


def bending_stiffness(plate: PlateSpec) -> complex:
    """Complex bending stiffness D = E h^3 / (12 (1 - nu^2)) * (1 + i eta) in N*m."""
    d_real = plate.E * plate.h**3 / (12.0 * (1.0 - plate.nu**2))
    return d_real * (1.0 + 1j * plate.eta)


def surface_mass_density(plate: PlateSpec) -> float:
    """Surface mass density m = rho * h in kg/m^2."""
    return plate.rho * plate.h


def resonance_coefficient(plate: PlateSpec) -> float:
    """Resonance coefficient R = Re(D) / (m a^4 b^4).

    Uses the real part of the bending stiffness, so R is independent of
    the damping loss factor.
    """
    d_real = bending_stiffness(plate).real
    m = surface_mass_density(plate)
    return d_real / (m * plate.a**4 * plate.b**4)


def critical_frequency(plate: PlateSpec, fluid: FluidSpec = AIR) -> float:
    """Critical frequency in Hz: lowest coincidence frequency, at grazing incidence."""
    d_real = bending_stiffness(plate).real
    m = surface_mass_density(plate)
    return fluid.c0**2 / (2.0 * math.pi) * math.sqrt(m / d_real)


def coincidence_frequency(plate: PlateSpec, fluid: FluidSpec, theta: float) -> float:
    """Coincidence frequency f_crit / sin^2(theta) in Hz for incidence angle theta.

    theta = 0 has no coincidence (the trace wavenumber vanishes).
    """
    if not (0.0 < theta <= math.pi / 2):
        raise ValidationError(f"coincidence requires 0 < theta <= pi/2, got {theta!r}")
    return critical_frequency(plate, fluid) / math.sin(theta) ** 2


def natural_frequency(plate: PlateSpec, m_idx: int, n_idx: int) -> complex:
    """Natural angular frequency omega_mn (rad/s) of the simply supported plate.

    omega_mn^2 = (D/m) * ((m_idx*pi/a)^2 + (n_idx*pi/b)^2)^2 with complex D,
    so a damped plate returns a complex omega_mn; eta = 0 gives a real value.
    """
    if m_idx < 1 or n_idx < 1:
        raise ValidationError(f"mode indices must be >= 1, got ({m_idx!r}, {n_idx!r})")
    d = bending_stiffness(plate)
    m = surface_mass_density(plate)
    k2 = (m_idx * math.pi / plate.a) ** 2 + (n_idx * math.pi / plate.b) ** 2
    return cmath.sqrt(d / m * k2**2)


# -- file ingestion ----------------------------------------------------------

_PLATE_KEYS = ("rho", "E", "nu", "eta_percent", "h_mm", "a", "b")


def plate_from_dict(doc: dict) -> PlateSpec:
    """Build a PlateSpec from a mapping in table units (E GPa, eta %, h mm)."""
    missing = [k for k in _PLATE_KEYS if k not in doc]
    if missing:
        raise ParseError(f"plate document missing keys: {', '.join(missing)}")
    try:
        values = {k: float(doc[k]) for k in _PLATE_KEYS}
    except (TypeError, ValueError) as exc:
        raise ParseError(f"plate document has a non-numeric field: {exc}") from None
    return PlateSpec(
        rho=values["rho"],
        E=values["E"] * 1e9,
        nu=values["nu"],
        eta=values["eta_percent"] / 100.0,
        h=values["h_mm"] / 1000.0,
        a=values["a"],
        b=values["b"],
    )


def fluid_from_dict(doc: dict) -> FluidSpec:
    """Fluid from optional 'rho0'/'c0' keys; absent keys fall back to air."""
    return FluidSpec(
        rho0=float(doc.get("rho0", AIR.rho0)),
        c0=float(doc.get("c0", AIR.c0)),
    )


def plate_from_json(path) -> PlateSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return plate_from_dict(doc)


def fluid_from_json(path) -> FluidSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return fluid_from_dict(doc)
