"""Gauss-Legendre rules for the diffuse-field incidence average.

The diffuse transparency is

    tau_d(w) = int tau(phi, theta, w) cos(theta) sin(theta) dtheta dphi
               / int cos(theta) sin(theta) dtheta dphi

over theta in (0, theta_max) and phi in (0, 2*pi). Azimuth nodes live on
(0, pi/2); rectangular-plate symmetry (|response| even under kx -> -kx and
ky -> -ky) makes the full-circle integral four times the quarter integral.

Above the critical frequency the infinite-plate transparency has a narrow
coincidence resonance in theta (width ~ eta). A plain rule undersamples it,
so the theta rule switches to composite panels concentrated around the
coincidence angle; panel orders scale with n_theta, which keeps
order-doubling convergence checks meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .plate import FluidSpec, PlateSpec, bending_stiffness, surface_mass_density

__all__ = ["QuadratureScheme", "gauss_rule", "diffuse_denominator"]

_LEGGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_rule(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped to (lo, hi). Nodes are strictly interior."""
    if n < 1:
        raise ValidationError(f"quadrature order must be >= 1, got {n}")
    if n not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[n] = np.polynomial.legendre.leggauss(n)
    x, w = _LEGGAUSS_CACHE[n]
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


@dataclass(frozen=True)
class QuadratureScheme:
    """Diffuse-field quadrature configuration.

    n_theta   total polar nodes on (0, theta_max)
    n_phi     azimuth nodes on (0, pi/2), expanded 4-fold to cover (0, 2*pi)
    theta_max polar cutoff, pi/2 by default
    """

    n_theta: int = 64
    n_phi: int = 16
    theta_max: float = math.pi / 2

    def __post_init__(self):
        if self.n_theta < 2:
            raise ValidationError(f"n_theta must be >= 2, got {self.n_theta}")
        if self.n_phi < 1:
            raise ValidationError(f"n_phi must be >= 1, got {self.n_phi}")
        if not (0.0 < self.theta_max <= math.pi / 2):
            raise ValidationError(f"theta_max must lie in (0, pi/2], got {self.theta_max}")

    def refined(self, factor: int) -> "QuadratureScheme":
        """Same scheme with every order multiplied by `factor` (convergence studies)."""
        return QuadratureScheme(self.n_theta * factor, self.n_phi * factor, self.theta_max)

    def phi_rule(self) -> tuple[np.ndarray, np.ndarray]:
        return gauss_rule(0.0, math.pi / 2, self.n_phi)

    def theta_rule(self) -> tuple[np.ndarray, np.ndarray]:
        return gauss_rule(0.0, self.theta_max, self.n_theta)

    def theta_rule_coincidence(
        self, plate: PlateSpec, fluid: FluidSpec, omega: float
    ) -> tuple[np.ndarray, np.ndarray]:
        """Polar rule with panels packed around the coincidence angle.

        sin^2(theta_c) = f_crit/f locates the impedance collapse; the
        resonance half-width follows from linearising 1 - X around theta_c
        with the Lorentzian half-width (1 + beta*eta)/beta, where
        beta = omega*m*cos(theta)/(2*rho0*c0). Below ~0.75 f_crit the
        integrand is smooth and the plain rule is used.
        """
        m = surface_mass_density(plate)
        d_real = bending_stiffness(plate).real
        omega_crit = fluid.c0**2 * math.sqrt(m / d_real)
        s_star = omega_crit / omega  # sin^2 at coincidence
        if s_star > 1.3:
            return self.theta_rule()

        sin_c = min(math.sqrt(s_star), 1.0 - 1e-12)
        theta_c = math.asin(sin_c)
        cos_c = math.cos(theta_c)
        beta_c = omega * m * max(cos_c, 1e-9) / (2.0 * fluid.rho0 * fluid.c0)
        half_width = math.tan(theta_c) * (1.0 + beta_c * plate.eta) / (4.0 * beta_c)
        delta = min(max(8.0 * half_width, 0.02), 0.35 * self.theta_max)

        lo = max(theta_c - delta, 0.0)
        hi = min(theta_c + delta, self.theta_max)
        edges = [0.0]
        if lo > 1e-3:
            edges.append(lo)
        edges.append(hi)
        if hi < self.theta_max - 1e-9:
            edges.append(self.theta_max)
        # the resonance panel takes half the nodes; flanks share the rest by width
        n_res = max(self.n_theta // 2, 8)
        panels = list(zip(edges[:-1], edges[1:]))
        res_idx = edges.index(hi) - 1
        widths = [e1 - e0 for e0, e1 in panels]
        flank_total = sum(w for i, w in enumerate(widths) if i != res_idx)
        counts = []
        remaining = self.n_theta - n_res
        for i, w in enumerate(widths):
            if i == res_idx:
                counts.append(n_res)
            elif flank_total > 0.0:
                counts.append(max(4, int(round(remaining * w / flank_total))))
            else:
                counts.append(4)
        nodes, weights = [], []
        for (e0, e1), cnt in zip(panels, counts):
            x, w = gauss_rule(e0, e1, cnt)
            nodes.append(x)
            weights.append(w)
        return np.concatenate(nodes), np.concatenate(weights)


def diffuse_denominator(scheme: QuadratureScheme) -> float:
    """Quadrature value of int cos sin dtheta dphi over the full azimuth circle.

    Equals pi analytically for theta_max = pi/2.
    """
    th, wt = scheme.theta_rule()
    ph_w = scheme.phi_rule()[1]
    return float(np.sum(wt * np.cos(th) * np.sin(th)) * 4.0 * np.sum(ph_w))
