"""k-nearest-neighbour classifier: memorize training rows, vote at query time."""
from __future__ import annotations

import numpy as np

from .params import KNNParams

_CHUNK = 512


def fit(params: KNNParams, x: np.ndarray, y: np.ndarray, n_classes: int, seed: int) -> dict:
    return {"x": np.array(x, dtype=float), "y": np.array(y, dtype=np.int64)}


def predict(state: dict, params: KNNParams, x: np.ndarray, n_classes: int) -> np.ndarray:
    train = state["x"]
    labels = state["y"]
    k = min(params.k, len(train))
    train_sq = (train**2).sum(axis=1)
    out = np.empty(len(x), dtype=np.int64)
    for start in range(0, len(x), _CHUNK):
        chunk = x[start : start + _CHUNK]
        d2 = (chunk**2).sum(axis=1)[:, None] - 2.0 * (chunk @ train.T) + train_sq[None, :]
        # stable sort: equal distances resolve to the lowest training index
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
        votes = labels[nearest]
        counts = np.zeros((len(chunk), n_classes), dtype=np.int64)
        np.add.at(counts, (np.arange(len(chunk))[:, None], votes), 1)
        out[start : start + _CHUNK] = counts.argmax(axis=1)
    return out


def state_to_json(state: dict) -> dict:
    return {"x": state["x"].tolist(), "y": state["y"].tolist()}


def state_from_json(d: dict) -> dict:
    return {"x": np.array(d["x"], dtype=float), "y": np.array(d["y"], dtype=np.int64)}
