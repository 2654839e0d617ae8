"""Multi-layer perceptron: ReLU hiddens, softmax output, cross-entropy loss,
plain mini-batch gradient descent for a fixed number of epochs."""
from __future__ import annotations

import numpy as np

from ..dataset import derive_seed
from .params import MLPParams


def init_params(layer_sizes: list[int], rng: np.random.Generator):
    """Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def forward(weights, biases, x: np.ndarray) -> np.ndarray:
    """Class probabilities via a numerically stable softmax."""
    h = x
    for w, b in zip(weights[:-1], biases[:-1]):
        h = np.maximum(h @ w + b, 0.0)
    logits = h @ weights[-1] + biases[-1]
    logits = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(logits)
    return exp / exp.sum(axis=1, keepdims=True)


def loss_and_grads(weights, biases, x: np.ndarray, y_onehot: np.ndarray):
    """Mean cross-entropy and its gradients; backbone of training and the
    finite-difference gradient check in the tests."""
    activations = [x]
    pre = []
    h = x
    for w, b in zip(weights[:-1], biases[:-1]):
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0)
        activations.append(h)
    logits = h @ weights[-1] + biases[-1]
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    n = len(x)
    loss = float(-(y_onehot * np.log(probs + 1e-300)).sum() / n)

    grad_w = [None] * len(weights)
    grad_b = [None] * len(biases)
    delta = (probs - y_onehot) / n
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = activations[layer].T @ delta
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[layer].T) * (pre[layer - 1] > 0)
    return loss, grad_w, grad_b


def fit(params: MLPParams, x: np.ndarray, y: np.ndarray, n_classes: int, seed: int) -> dict:
    rng = np.random.default_rng(derive_seed(seed, 0))
    sizes = [x.shape[1], *params.hidden_sizes, n_classes]
    weights, biases = init_params(sizes, rng)
    y_onehot = np.zeros((len(x), n_classes))
    y_onehot[np.arange(len(x)), y] = 1.0
    n = len(x)
    for _ in range(params.epochs):
        order = rng.permutation(n)
        for start in range(0, n, params.batch_size):
            batch = order[start : start + params.batch_size]
            _, grad_w, grad_b = loss_and_grads(weights, biases, x[batch], y_onehot[batch])
            for layer in range(len(weights)):
                weights[layer] -= params.learning_rate * grad_w[layer]
                biases[layer] -= params.learning_rate * grad_b[layer]
    return {"weights": weights, "biases": biases}


def predict_proba(state: dict, x: np.ndarray) -> np.ndarray:
    return forward(state["weights"], state["biases"], x)


def predict(state: dict, params: MLPParams, x: np.ndarray, n_classes: int) -> np.ndarray:
    return predict_proba(state, x).argmax(axis=1)


def state_to_json(state: dict) -> dict:
    return {
        "weights": [w.tolist() for w in state["weights"]],
        "biases": [b.tolist() for b in state["biases"]],
    }


def state_from_json(d: dict) -> dict:
    return {
        "weights": [np.array(w, dtype=float) for w in d["weights"]],
        "biases": [np.array(b, dtype=float) for b in d["biases"]],
    }
