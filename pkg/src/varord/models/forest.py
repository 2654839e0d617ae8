"""Random forest: bagged Gini trees with per-node feature subsampling."""
from __future__ import annotations

import math
import random

import numpy as np

from ..dataset import derive_seed
from .params import RFParams
from .tree import grow, predict_tree


def _n_features(mode: str, d: int) -> int:
    if mode == "all":
        return d
    return max(1, int(round(math.sqrt(d))))


def fit(params: RFParams, x: np.ndarray, y: np.ndarray, n_classes: int, seed: int) -> dict:
    n = len(x)
    m = _n_features(params.max_features, x.shape[1])
    trees = []
    for t in range(params.n_trees):
        rng = random.Random(derive_seed(seed, t))
        bootstrap = np.fromiter(
            (rng.randrange(n) for _ in range(n)), dtype=np.int64, count=n
        )
        root = grow(
            x, y, bootstrap, n_classes,
            depth=0, max_depth=params.max_depth, min_samples_split=2,
            feature_rng=rng, max_features=m,
        )
        trees.append(root)
    return {"trees": trees}


def predict(state: dict, params: RFParams, x: np.ndarray, n_classes: int) -> np.ndarray:
    counts = np.zeros((len(x), n_classes), dtype=np.int64)
    rows = np.arange(len(x))
    for root in state["trees"]:
        counts[rows, predict_tree(root, x)] += 1
    return counts.argmax(axis=1)


def state_to_json(state: dict) -> dict:
    return {"trees": state["trees"]}


def state_from_json(d: dict) -> dict:
    return {"trees": d["trees"]}
