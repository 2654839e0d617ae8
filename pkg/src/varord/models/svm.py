"""Soft-margin SVM trained by sequential minimal optimization, one-vs-rest.

Each class gets a binary +-1 problem solved by two-multiplier updates on a
shared precomputed kernel matrix.  The pair is the maximal violating pair of
the dual KKT conditions, so the procedure is deterministic and stops exactly
when the KKT gap falls below the dual tolerance (every margin then holds
within tol/2), or at an iteration cap that keeps very large fits bounded.
"""
from __future__ import annotations

import numpy as np

from .params import SVMParams

DUAL_TOL = 1e-3
_SUPPORT_EPS = 1e-10
_BOUND_EPS = 1e-12


def _max_iter(n: int) -> int:
    return max(5_000, 8 * n)


def resolve_gamma(params: SVMParams, x: np.ndarray) -> float:
    if params.gamma == "scale":
        var = float(x.var())
        return 1.0 / (x.shape[1] * var) if var > 0 else 1.0
    return float(params.gamma)


def kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return a @ b.T
    sq = (a**2).sum(axis=1)[:, None] - 2.0 * (a @ b.T) + (b**2).sum(axis=1)[None, :]
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def smo_binary(
    kernel: np.ndarray, y: np.ndarray, c: float,
    tol: float = DUAL_TOL, max_iter: int | None = None,
) -> tuple[np.ndarray, float]:
    """Dual coordinate optimization of one binary problem; returns (alpha, bias).

    Maintains the dual gradient G = Q alpha - 1 and repeatedly steps along the
    maximal violating pair; on exit every free point satisfies its margin
    constraint within tol/2 of the recovered bias.
    """
    n = len(y)
    if max_iter is None:
        max_iter = _max_iter(n)
    alpha = np.zeros(n)
    # g = y * grad, so the violating-pair scores are just -g; updating only
    # the two touched multipliers keeps the up/low masks incremental
    g = -y.astype(float)
    diag = kernel.diagonal()
    pos = y > 0
    not_up = np.zeros(n, dtype=bool)
    not_low = np.zeros(n, dtype=bool)
    work = np.empty(n)
    buf = np.empty(n)
    bias = 0.0

    def refresh_masks(t: int):
        if pos[t]:
            not_up[t] = not alpha[t] < c - _BOUND_EPS
            not_low[t] = not alpha[t] > _BOUND_EPS
        else:
            not_up[t] = not alpha[t] > _BOUND_EPS
            not_low[t] = not alpha[t] < c - _BOUND_EPS

    for t in range(n):
        refresh_masks(t)
    for _ in range(max_iter):
        if not_up.all() or not_low.all():
            break
        np.copyto(work, g)
        work[not_up] = np.inf
        i = int(work.argmin())  # max of -g over the up set
        np.copyto(work, g)
        work[not_low] = -np.inf
        j = int(work.argmax())  # min of -g over the low set
        gap_hi = -g[i]
        gap_lo = -g[j]
        bias = (gap_hi + gap_lo) / 2.0  # free-vector scores all equal the bias at optimum
        if gap_hi - gap_lo <= tol:
            break
        a_i, a_j = alpha[i], alpha[j]
        if y[i] == y[j]:
            lo_b, hi_b = max(0.0, a_i + a_j - c), min(c, a_i + a_j)
        else:
            lo_b, hi_b = max(0.0, a_j - a_i), min(c, c + a_j - a_i)
        eta = 2.0 * kernel[i, j] - diag[i] - diag[j]
        if eta >= 0.0:
            eta = -1e-12
        # y_t * grad_t equals g_t, so the Platt error difference is g_i - g_j
        new_j = float(np.clip(a_j - y[j] * (g[i] - g[j]) / eta, lo_b, hi_b))
        new_i = a_i + y[i] * y[j] * (a_j - new_j)
        d_i = (new_i - a_i) * y[i]
        d_j = (new_j - a_j) * y[j]
        if d_i == 0.0 and d_j == 0.0:
            break
        alpha[i] = new_i
        alpha[j] = new_j
        np.multiply(kernel[i], d_i, out=buf)
        g += buf
        np.multiply(kernel[j], d_j, out=buf)
        g += buf
        refresh_masks(i)
        refresh_masks(j)
    return alpha, float(bias)


def fit(params: SVMParams, x: np.ndarray, y: np.ndarray, n_classes: int, seed: int) -> dict:
    gamma = resolve_gamma(params, x)
    kernel = kernel_matrix(x, x, params.kernel, gamma)
    classes = []
    for c_idx in range(n_classes):
        y_pm = np.where(y == c_idx, 1.0, -1.0)
        alpha, b = smo_binary(kernel, y_pm, params.C)
        keep = alpha > _SUPPORT_EPS
        classes.append(
            {"sv": x[keep].copy(), "coef": (alpha * y_pm)[keep].copy(), "b": b}
        )
    return {"classes": classes, "gamma": gamma}


def decision_values(state: dict, params: SVMParams, x: np.ndarray) -> np.ndarray:
    """One-vs-rest decision value per class, shape (len(x), n_classes)."""
    cols = []
    for cls in state["classes"]:
        if len(cls["sv"]) == 0:
            cols.append(np.full(len(x), cls["b"]))
            continue
        k = kernel_matrix(x, cls["sv"], params.kernel, state["gamma"])
        cols.append(k @ cls["coef"] + cls["b"])
    return np.stack(cols, axis=1)


def predict(state: dict, params: SVMParams, x: np.ndarray, n_classes: int) -> np.ndarray:
    return decision_values(state, params, x).argmax(axis=1)


def state_to_json(state: dict) -> dict:
    return {
        "gamma": state["gamma"],
        "classes": [
            {"sv": cls["sv"].tolist(), "coef": cls["coef"].tolist(), "b": cls["b"]}
            for cls in state["classes"]
        ],
    }


def state_from_json(d: dict) -> dict:
    return {
        "gamma": d["gamma"],
        "classes": [
            {
                "sv": np.array(cls["sv"], dtype=float) if cls["sv"] else np.zeros((0, 0)),
                "coef": np.array(cls["coef"], dtype=float),
                "b": cls["b"],
            }
            for cls in d["classes"]
        ],
    }
