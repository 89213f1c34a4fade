"""Fully connected feed-forward network trained with Adam.

Architecture: n_inputs -> five sigmoid hidden layers of 32 units -> linear
outputs. Loss is the mean squared error over all batch entries and outputs
plus an L2 penalty on the hidden-layer weight matrices. Weights start
Glorot-uniform (+-sqrt(6/(fan_in+fan_out))), biases at zero.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericalError, ValidationError

__all__ = ["MlpParams", "init_params", "forward", "loss_and_grads", "fit", "predict"]


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class MlpParams:
    """Weight/bias lists; weights[i] maps layer i to layer i+1."""

    def __init__(self, weights, biases):
        self.weights = list(weights)
        self.biases = list(biases)

    def copy(self):
        return MlpParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def to_dict(self):
        return {
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            [np.asarray(w, dtype=np.float64) for w in doc["weights"]],
            [np.asarray(b, dtype=np.float64) for b in doc["biases"]],
        )


def init_params(n_in: int, n_out: int, rng, hidden_layers=5, hidden_units=32) -> MlpParams:
    sizes = [n_in] + [hidden_units] * hidden_layers + [n_out]
    weights, biases = [], []
    for fi, fo in zip(sizes[:-1], sizes[1:]):
        lim = np.sqrt(6.0 / (fi + fo))
        weights.append(rng.uniform(-lim, lim, size=(fi, fo)))
        biases.append(np.zeros(fo))
    return MlpParams(weights, biases)


def forward(params: MlpParams, X: np.ndarray) -> np.ndarray:
    a = X
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w + b
        a = z if i == last else _sigmoid(z)
    return a


def loss_and_grads(params: MlpParams, X, Y, l2: float):
    """Loss (MSE over batch*outputs + L2 on hidden weights) and its gradients."""
    acts = [X]
    last = len(params.weights) - 1
    a = X
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w + b
        a = z if i == last else _sigmoid(z)
        acts.append(a)
    pred = acts[-1]
    resid = pred - Y
    mse = float(np.mean(resid**2))
    loss = mse
    grad_w = [None] * len(params.weights)
    grad_b = [None] * len(params.biases)
    delta = 2.0 * resid / resid.size
    for i in range(last, -1, -1):
        grad_w[i] = acts[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            a_prev = acts[i]
            delta = (delta @ params.weights[i].T) * a_prev * (1.0 - a_prev)
    # L2 on the kernels feeding the hidden layers (not the linear output layer)
    for i in range(last):
        loss += l2 * float(np.sum(params.weights[i] ** 2))
        grad_w[i] = grad_w[i] + 2.0 * l2 * params.weights[i]
    return loss, grad_w, grad_b


def fit(
    X,
    Y,
    seed: int,
    epochs=1500,
    batch_size=32,
    learning_rate=1e-3,
    l2=1e-7,
    hidden_layers=5,
    hidden_units=32,
    beta1=0.9,
    beta2=0.999,
    eps=1e-8,
) -> MlpParams:
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape[0] != Y.shape[0]:
        raise ValidationError("X and Y row counts differ")
    n = X.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence([0x4E4E, int(seed)]))
    params = init_params(X.shape[1], Y.shape[1], rng, hidden_layers, hidden_units)
    m_w = [np.zeros_like(w) for w in params.weights]
    v_w = [np.zeros_like(w) for w in params.weights]
    m_b = [np.zeros_like(b) for b in params.biases]
    v_b = [np.zeros_like(b) for b in params.biases]
    t = 0
    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            loss, gw, gb = loss_and_grads(params, X[batch], Y[batch], l2)
            if not np.isfinite(loss):
                raise NumericalError(f"NN training diverged at epoch {epoch}", epoch=epoch)
            t += 1
            c1 = 1.0 - beta1**t
            c2 = 1.0 - beta2**t
            for i in range(len(params.weights)):
                m_w[i] = beta1 * m_w[i] + (1.0 - beta1) * gw[i]
                v_w[i] = beta2 * v_w[i] + (1.0 - beta2) * gw[i] ** 2
                params.weights[i] -= learning_rate * (m_w[i] / c1) / (np.sqrt(v_w[i] / c2) + eps)
                m_b[i] = beta1 * m_b[i] + (1.0 - beta1) * gb[i]
                v_b[i] = beta2 * v_b[i] + (1.0 - beta2) * gb[i] ** 2
                params.biases[i] -= learning_rate * (m_b[i] / c1) / (np.sqrt(v_b[i] / c2) + eps)
    return params


def predict(params: MlpParams, X) -> np.ndarray:
    return forward(params, np.asarray(X, dtype=np.float64))
