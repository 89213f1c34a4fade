import math

import numpy as np
import pytest

from stl_lab.correction import (
    correction_factor_tau,
    finite_radiation_efficiency,
    sigma_r_fast,
    sigma_r_oracle,
    sigma_r_wavenumber,
)
from stl_lab.errors import NumericalError
from stl_lab.grids import FrequencyGrid, band_average, third_octave_bands
from stl_lab.infinite import infinite_plate_tau
from stl_lab.plate import AIR, PlateSpec, WaveIncidence
from stl_lab.quadrature import QuadratureScheme, gauss_rule
from stl_lab.simulate import stl_curve

MID = PlateSpec(rho=2500, E=105e9, nu=0.3, eta=0.0105, h=0.006, a=0.45, b=0.45)
BIG = PlateSpec(rho=2500, E=105e9, nu=0.3, eta=0.0105, h=0.006, a=5.0, b=5.0)


def _inc(f, theta, phi):
    return WaveIncidence(theta=theta, phi=phi, omega=2 * math.pi * f)


def test_sigma_fast_matches_oracle_on_random_triples():
    rng = np.random.default_rng(7)
    for _ in range(20):
        r = rng.uniform([2000, 60, 0.25, 0.1, 5, 0.3, 0.3], [3000, 150, 0.35, 2.0, 7, 0.6, 0.6])
        plate = PlateSpec(rho=r[0], E=r[1] * 1e9, nu=r[2], eta=r[3] / 100, h=r[4] / 1000, a=r[5], b=r[6])
        inc = _inc(rng.uniform(60, 2500), rng.uniform(0, math.pi / 2 - 0.01), rng.uniform(0, 2 * math.pi))
        fast = finite_radiation_efficiency(plate, AIR, inc, check=False)
        oracle = sigma_r_oracle(plate, AIR, inc)
        assert fast == pytest.approx(oracle, rel=0.02)


def test_sigma_routes_agree_wavenumber_domain():
    # third, mathematically independent evaluation (radiating-circle integral)
    for f, th, ph in [(300.0, 0.4, 0.9), (1200.0, 1.0, 0.3), (2400.0, 1.35, 2.0)]:
        inc = _inc(f, th, ph)
        fast = finite_radiation_efficiency(MID, AIR, inc, check=False)
        wav = sigma_r_wavenumber(MID, AIR, inc)
        assert fast == pytest.approx(wav, rel=1e-6)


def test_sigma_quadruple_integral_literal():
    # brute tensor Gauss quadrature of the raw 4-D surface integral at low ka,
    # where the integrable 1/r diagonal is resolved by sheer node count
    a = b = 0.4
    f, th, ph = 150.0, 0.5, 0.8
    inc = _inc(f, th, ph)
    k = inc.omega / AIR.c0
    kx, ky, _ = inc.wavenumbers(AIR)
    n = 48
    x, wx = gauss_rule(0.0, a, n)
    y, wy = gauss_rule(0.0, b, n)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    wxy = np.outer(wx, wy)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    w4 = np.outer(wxy.ravel(), wxy.ravel())
    dx = pts[:, 0][:, None] - pts[:, 0][None, :]
    dy = pts[:, 1][:, None] - pts[:, 1][None, :]
    rr = np.hypot(dx, dy)
    np.fill_diagonal(rr, 1.0)
    kern = np.sin(k * rr + kx * dx + ky * dy) / (2 * math.pi * rr)
    np.fill_diagonal(kern, 0.0)
    sigma_lit = k / (a * b) * float(np.sum(w4 * kern))
    fast = sigma_r_fast(PlateSpec(rho=2500, E=105e9, nu=0.3, eta=0.01, h=0.006, a=a, b=b),
                        AIR, kx, ky, inc.omega)
    assert fast == pytest.approx(sigma_lit, rel=0.05)


def test_sigma_azimuth_periodicity():
    # sigma(theta, phi) = sigma(theta, phi + pi) for a rectangle
    for phi in (0.3, 1.0, 2.4):
        s1 = finite_radiation_efficiency(MID, AIR, _inc(900, 0.9, phi), check=False)
        s2 = finite_radiation_efficiency(MID, AIR, _inc(900, 0.9, phi + math.pi), check=False)
        assert s1 == pytest.approx(s2, rel=1e-12)


def test_sigma_large_plate_transparency_limit():
    inc = _inc(2000, math.radians(30), 0.0)
    sigma = finite_radiation_efficiency(BIG, AIR, inc, check=False)
    assert 0.8 <= sigma * math.cos(inc.theta) <= 1.2


def test_sigma_piston_limit():
    # ka << 1: sigma -> k^2 a b / (2 pi)
    inc = _inc(5.0, 0.0, 0.0)
    k = inc.omega / AIR.c0
    sigma = finite_radiation_efficiency(MID, AIR, inc, check=False)
    assert sigma == pytest.approx(k**2 * MID.a * MID.b / (2 * math.pi), rel=1e-3)


def test_sigma_self_convergence_at_500hz():
    kx, ky, _ = _inc(500, 0.7, 0.5).wavenumbers(AIR)
    w = 2 * math.pi * 500
    s1 = sigma_r_fast(MID, AIR, kx, ky, w)
    s2 = sigma_r_fast(MID, AIR, kx, ky, w, scale=3.6)
    assert abs(s2 - s1) / s2 < 1e-3


def test_sigma_nonconvergence_raises_with_both_estimates():
    with pytest.raises(NumericalError) as err:
        finite_radiation_efficiency(BIG, AIR, _inc(2300, 1.2, 0.7), rtol=1e-16)
    assert "coarse" in err.value.diagnostics and "fine" in err.value.diagnostics


def test_correction_tau_identity_when_sigma_cos_is_one():
    inc = _inc(800, 0.6, 0.9)
    tau_inf = infinite_plate_tau(MID, AIR, inc)
    sigma = finite_radiation_efficiency(MID, AIR, inc, check=False)
    assert correction_factor_tau(MID, AIR, inc) == pytest.approx(
        min(sigma * math.cos(inc.theta) * tau_inf, 1.0), rel=1e-12
    )


def test_correction_mainly_modifies_below_critical():
    grid = FrequencyGrid(np.geomspace(50, 2500, 48))
    quad = QuadratureScheme(32, 8)
    ci = stl_curve("infinite", MID, AIR, grid, quad)
    cc = stl_curve("correction", MID, AIR, grid, quad)
    diff = np.abs(cc.values - ci.values)
    low = grid.frequencies < 400
    high = grid.frequencies > 2000
    assert diff[low].mean() > 3 * diff[high].mean()


def test_large_plate_banded_curve_tracks_infinite_above_500hz():
    # theta capped at the common 78 deg practice: the infinite model's
    # grazing-incidence transmission otherwise dominates its diffuse
    # average, which no finite plate reproduces
    bands = third_octave_bands(500, 2000)
    grid = FrequencyGrid(np.geomspace(420, 2400, 64))
    quad = QuadratureScheme(32, 8, theta_max=math.radians(78))
    ci = band_average(stl_curve("infinite", BIG, AIR, grid, quad), bands)
    cc = band_average(stl_curve("correction", BIG, AIR, grid, quad), bands)
    assert np.max(np.abs(cc.values - ci.values)) < 2.0
