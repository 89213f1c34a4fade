"""Gaussian process regression with a c*Matern32 + RBF + white-noise kernel.

One shared isotropic kernel serves all outputs: the log-marginal
likelihood is summed over output columns and a single Cholesky
factorisation is reused. Hyperparameters (c, l_M, l_R, sigma^2) are
optimised in log space with L-BFGS-B, bounds [1e-5, 1e5], from a default
start plus ten seeded log-uniform restarts.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from ..errors import NumericalError, ValidationError

__all__ = ["GprState", "kernel_matrix", "lml_and_grad", "fit", "predict"]

_SQRT3 = math.sqrt(3.0)
_LOG_BOUNDS = (math.log(1e-5), math.log(1e5))
_JITTERS = (1e-10, 1e-8, 1e-6)


def _dist(X1, X2):
    d2 = (
        np.sum(X1**2, axis=1)[:, None]
        + np.sum(X2**2, axis=1)[None, :]
        - 2.0 * (X1 @ X2.T)
    )
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


def kernel_matrix(X1, X2, c, l_m, l_r, s2, diag_noise):
    """c*Matern32 + RBF (+ s2 on the diagonal when diag_noise)."""
    r = _dist(X1, X2)
    s = _SQRT3 * r / l_m
    k = c * (1.0 + s) * np.exp(-s) + np.exp(-(r**2) / (2.0 * l_r**2))
    if diag_noise:
        k[np.diag_indices_from(k)] += s2
    return k


def _chol_with_jitter(K):
    last_exc = None
    for jitter in _JITTERS:
        try:
            K2 = K.copy()
            K2[np.diag_indices_from(K2)] += jitter
            return cholesky(K2, lower=True), jitter
        except np.linalg.LinAlgError as exc:
            last_exc = exc
    diag = np.diag(K)
    raise NumericalError(
        f"kernel matrix not positive definite even with jitter {_JITTERS[-1]:g}",
        diag_min=float(diag.min()),
        diag_max=float(diag.max()),
    ) from last_exc


def lml_and_grad(theta, X, Y):
    """Summed log-marginal likelihood over outputs and its gradient in log-space.

    theta = log([c, l_M, l_R, sigma^2]).
    """
    c, l_m, l_r, s2 = np.exp(theta)
    n, n_out = Y.shape
    r = _dist(X, X)
    s = _SQRT3 * r / l_m
    exp_s = np.exp(-s)
    matern = (1.0 + s) * exp_s
    rbf = np.exp(-(r**2) / (2.0 * l_r**2))
    K = c * matern + rbf
    K[np.diag_indices_from(K)] += s2 + _JITTERS[0]
    try:
        L = cholesky(K, lower=True)
    except np.linalg.LinAlgError:
        return -np.inf, np.zeros(4)
    alpha = cho_solve((L, True), Y)
    lml = (
        -0.5 * float(np.sum(Y * alpha))
        - n_out * float(np.sum(np.log(np.diag(L))))
        - 0.5 * n_out * n * math.log(2.0 * math.pi)
    )
    k_inv = cho_solve((L, True), np.eye(n))
    inner = alpha @ alpha.T - n_out * k_inv
    # dK/dlog(c) = c*matern ; dK/dlog(l_m) = c*s^2*exp(-s)
    # dK/dlog(l_r) = rbf*r^2/l_r^2 ; dK/dlog(s2) = s2*I
    grad = np.empty(4)
    grad[0] = 0.5 * float(np.sum(inner * (c * matern)))
    grad[1] = 0.5 * float(np.sum(inner * (c * s**2 * exp_s)))
    grad[2] = 0.5 * float(np.sum(inner * (rbf * (r**2 / l_r**2))))
    grad[3] = 0.5 * s2 * float(np.trace(inner))
    return lml, grad


class GprState:
    def __init__(self, x_train, theta, alpha, lml):
        self.x_train = x_train
        self.theta = theta
        self.alpha = alpha
        self.lml = lml

    def to_dict(self):
        return {
            "x_train": self.x_train.tolist(),
            "theta": self.theta.tolist(),
            "alpha": self.alpha.tolist(),
            "lml": self.lml,
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            np.asarray(doc["x_train"], dtype=np.float64),
            np.asarray(doc["theta"], dtype=np.float64),
            np.asarray(doc["alpha"], dtype=np.float64),
            float(doc["lml"]),
        )


def fit(X, Y, seed: int, n_restarts=10, maxiter=100, theta0=None) -> GprState:
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if X.shape[0] < 1:
        raise ValidationError("GPR needs at least one sample")

    def objective(theta):
        lml, grad = lml_and_grad(theta, X, Y)
        if not np.isfinite(lml):
            return 1e25, np.zeros(4)
        return -lml, -grad

    starts = [np.log([1.0, 1.0, 1.0, 1e-3]) if theta0 is None else np.asarray(theta0, dtype=float)]
    rng = np.random.default_rng(np.random.SeedSequence([0x6772, int(seed)]))
    for _ in range(n_restarts):
        starts.append(rng.uniform(_LOG_BOUNDS[0], _LOG_BOUNDS[1], size=4))
    best_theta, best_val = None, np.inf
    for start in starts:
        res = minimize(
            objective,
            start,
            jac=True,
            method="L-BFGS-B",
            bounds=[_LOG_BOUNDS] * 4,
            options={"maxiter": maxiter},
        )
        if res.fun < best_val:
            best_val, best_theta = res.fun, res.x
    c, l_m, l_r, s2 = np.exp(best_theta)
    K = kernel_matrix(X, X, c, l_m, l_r, s2, diag_noise=True)
    L, _ = _chol_with_jitter(K)
    # C-contiguous so predictions hit the same GEMM path before and after
    # JSON persistence
    alpha = np.ascontiguousarray(cho_solve((L, True), Y))
    return GprState(np.ascontiguousarray(X), best_theta.copy(), alpha, -float(best_val))


def predict(state: GprState, X_new) -> np.ndarray:
    c, l_m, l_r, s2 = np.exp(state.theta)
    k_star = kernel_matrix(
        np.asarray(X_new, dtype=np.float64), state.x_train, c, l_m, l_r, s2, diag_noise=False
    )
    return k_star @ state.alpha
