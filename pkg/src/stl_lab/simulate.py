"""Diffuse-field averaging and STL curve evaluation for the three models."""

from __future__ import annotations

import math

import numpy as np

from .correction import _sigma_fast_batch, _psi_panels
from .errors import ValidationError
from .grids import FrequencyGrid, StlCurve, tau_to_stl
from .infinite import tau_theta_grid
from .modal import ModalTruncation, modal_tau_grid
from .plate import AIR, FluidSpec, PlateSpec
from .quadrature import QuadratureScheme

__all__ = ["MODELS", "diffuse_tau", "stl_curve"]

MODELS = ("infinite", "correction", "modal")


def _check_model(model: str) -> str:
    if model not in MODELS:
        raise ValidationError(f"unknown STL model {model!r}; expected one of {MODELS}")
    return model


def _tau_d_infinite(plate, fluid, omegas, quad):
    """Diffuse transparency per frequency; the azimuth integral is skipped
    because the infinite-plate response is phi-independent."""
    out = np.empty(omegas.size)
    for i, w in enumerate(omegas):
        th, wt = quad.theta_rule_coincidence(plate, fluid, w)
        cs = np.cos(th) * np.sin(th)
        tau = tau_theta_grid(plate, fluid, w, th)
        out[i] = float(np.sum(wt * tau * cs) / np.sum(wt * cs))
    return out


def _tau_d_correction(plate, fluid, omegas, quad):
    ph, wp = quad.phi_rule()
    cp, sp = np.cos(ph), np.sin(ph)
    out = np.empty(omegas.size)
    sigma = None
    for i, w in enumerate(omegas):
        k = w / fluid.c0
        th, wt = quad.theta_rule_coincidence(plate, fluid, w)
        st, ct = np.sin(th), np.cos(th)
        kx = k * st[:, None] * cp[None, :]
        ky = k * st[:, None] * sp[None, :]
        if sigma is None or sigma.shape != kx.shape:
            sigma = np.empty(kx.size)
        _, wps, cpsi, spsi, r_psi = _psi_panels(plate.a, plate.b, k)
        _sigma_fast_batch(k, plate.a, plate.b, kx.ravel(), ky.ravel(), wps, cpsi, spsi, r_psi, sigma)
        tau_inf = tau_theta_grid(plate, fluid, w, th)
        tau_fin = sigma.reshape(kx.shape) * ct[:, None] * tau_inf[:, None]
        np.minimum(tau_fin, 1.0, out=tau_fin)  # transmitted power <= incident power
        cs = ct * st
        num = float(np.einsum("t,p,tp->", wt * cs, wp, tau_fin, optimize=False))
        den = float(np.sum(wt * cs) * np.sum(wp))
        out[i] = num / den
    return out


def _tau_d_modal(plate, fluid, omegas, quad, trunc):
    th, wt = quad.theta_rule()
    ph, wp = quad.phi_rule()
    tau = modal_tau_grid(plate, fluid, omegas, th, ph, trunc)
    cs = np.cos(th) * np.sin(th)
    num = np.einsum("t,p,ftp->f", wt * cs, wp, tau, optimize=False)
    den = float(np.sum(wt * cs) * np.sum(wp))
    return num / den


def diffuse_tau(
    model: str,
    plate: PlateSpec,
    fluid: FluidSpec,
    omega: float,
    quad: QuadratureScheme = QuadratureScheme(),
    trunc: ModalTruncation | None = None,
) -> float:
    """Diffuse-field transparency tau_d at one angular frequency."""
    _check_model(model)
    omegas = np.array([float(omega)])
    if omega <= 0.0:
        raise ValidationError(f"omega must be > 0, got {omega!r}")
    if model == "infinite":
        return float(_tau_d_infinite(plate, fluid, omegas, quad)[0])
    if model == "correction":
        return float(_tau_d_correction(plate, fluid, omegas, quad)[0])
    return float(_tau_d_modal(plate, fluid, omegas, quad, trunc or ModalTruncation())[0])


def stl_curve(
    model: str,
    plate: PlateSpec,
    fluid: FluidSpec = AIR,
    grid: FrequencyGrid | None = None,
    quad: QuadratureScheme = QuadratureScheme(),
    trunc: ModalTruncation | None = None,
) -> StlCurve:
    """Diffuse-field STL curve STL(f) = -10 log10(tau_d(2 pi f)) on a grid."""
    from .grids import default_grid

    _check_model(model)
    grid = grid or default_grid()
    omegas = grid.omegas
    if model == "infinite":
        tau_d = _tau_d_infinite(plate, fluid, omegas, quad)
    elif model == "correction":
        tau_d = _tau_d_correction(plate, fluid, omegas, quad)
    else:
        tau_d = _tau_d_modal(plate, fluid, omegas, quad, trunc or ModalTruncation())
    return StlCurve(grid, tau_to_stl(tau_d))
