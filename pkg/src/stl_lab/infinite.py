"""Analytical infinite-plate STL model.

The plate response is independent of azimuth and of the plate dimensions;
everything reduces to the structural impedance

    Z(w, theta) = (1 - w^2 D sin^4(theta) / (m c0^4)) * i w m

and the plane-wave transparency tau = |1 + Z cos(theta)/(2 rho0 c0)|^-2.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .plate import FluidSpec, PlateSpec, WaveIncidence, bending_stiffness, surface_mass_density

__all__ = ["infinite_plate_impedance", "infinite_plate_tau", "tau_theta_grid"]


def infinite_plate_impedance(plate: PlateSpec, fluid: FluidSpec, incidence: WaveIncidence) -> complex:
    """Structural impedance Z (Pa*s/m) of the infinite plate for one plane wave."""
    d = bending_stiffness(plate)
    m = surface_mass_density(plate)
    s4 = math.sin(incidence.theta) ** 4
    w = incidence.omega
    return (1.0 - w**2 * d * s4 / (m * fluid.c0**4)) * 1j * w * m


def infinite_plate_tau(plate: PlateSpec, fluid: FluidSpec, incidence: WaveIncidence) -> float:
    """Plane-wave transparency tau = |1 + Z cos(theta)/(2 rho0 c0)|^-2, in (0, 1]."""
    z = infinite_plate_impedance(plate, fluid, incidence)
    factor = 1.0 + z * math.cos(incidence.theta) / (2.0 * fluid.rho0 * fluid.c0)
    return 1.0 / abs(factor) ** 2


def tau_theta_grid(plate: PlateSpec, fluid: FluidSpec, omega, theta) -> np.ndarray:
    """Vectorised tau over broadcastable (omega, theta) arrays."""
    omega = np.asarray(omega, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(omega <= 0.0):
        raise ValidationError("omega must be > 0")
    if np.any((theta < 0.0) | (theta >= math.pi / 2)):
        raise ValidationError("theta must lie in [0, pi/2)")
    d = bending_stiffness(plate)
    m = surface_mass_density(plate)
    x = omega**2 * d.real * np.sin(theta) ** 4 / (m * fluid.c0**4)
    scale = omega * m * np.cos(theta) / (2.0 * fluid.rho0 * fluid.c0)
    # Z cos/(2 rho0 c0) = i*scale*(1 - x) + scale*eta*x;  tau = |1 + .|^-2
    re = 1.0 + scale * plate.eta * x
    im = scale * (1.0 - x)
    return 1.0 / (re**2 + im**2)
