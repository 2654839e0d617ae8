"""CART-style decision tree grown by best Gini split.

Split candidates are the midpoints between consecutive distinct values of
each feature, so the grown structure depends only on the ordering of feature
values, not their scale.  Ties everywhere resolve deterministically: lower
cost wins, then lower feature index, then lower threshold; leaves take the
lowest majority label.
"""
from __future__ import annotations

import random

import numpy as np

from .params import DTParams


def best_split(
    x: np.ndarray, y: np.ndarray, idx: np.ndarray, features, n_classes: int
):
    """Cheapest (weighted Gini) split of the rows in idx, or None if no feature splits."""
    n = len(idx)
    best = None  # (cost, feature, threshold)
    y_sub = y[idx]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y_sub] = 1.0
    for f in features:
        vals = x[idx, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        cuts = np.nonzero(sv[1:] > sv[:-1])[0]
        if len(cuts) == 0:
            continue
        cum = onehot[order].cumsum(axis=0)
        total = cum[-1]
        left = cum[cuts]
        right = total - left
        n_left = (cuts + 1).astype(float)
        n_right = n - n_left
        gini_left = 1.0 - ((left / n_left[:, None]) ** 2).sum(axis=1)
        gini_right = 1.0 - ((right / n_right[:, None]) ** 2).sum(axis=1)
        cost = (n_left * gini_left + n_right * gini_right) / n
        pos = int(np.argmin(cost))
        if best is None or cost[pos] < best[0]:
            cut = cuts[pos]
            threshold = (sv[cut] + sv[cut + 1]) / 2.0
            if threshold >= sv[cut + 1]:  # midpoint rounded up between adjacent floats
                threshold = float(sv[cut])
            best = (float(cost[pos]), int(f), float(threshold))
    return best


def _majority_label(y: np.ndarray, idx: np.ndarray, n_classes: int) -> int:
    counts = np.bincount(y[idx], minlength=n_classes)
    return int(counts.argmax())


def grow(
    x: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    n_classes: int,
    depth: int,
    max_depth: int | None,
    min_samples_split: int,
    feature_rng: random.Random | None = None,
    max_features: int | None = None,
) -> dict:
    """Recursive tree builder shared by the single tree and the forest."""
    labels = y[idx]
    if (
        len(idx) < min_samples_split
        or (max_depth is not None and depth >= max_depth)
        or (labels == labels[0]).all()
    ):
        return {"label": _majority_label(y, idx, n_classes)}
    d = x.shape[1]
    if feature_rng is not None and max_features is not None and max_features < d:
        features = sorted(feature_rng.sample(range(d), max_features))
    else:
        features = range(d)
    found = best_split(x, y, idx, features, n_classes)
    if found is None and feature_rng is not None:
        # the sampled features were all constant on this node; retry with all
        found = best_split(x, y, idx, range(d), n_classes)
    if found is None:
        return {"label": _majority_label(y, idx, n_classes)}
    _, feature, threshold = found
    mask = x[idx, feature] <= threshold
    left_idx = idx[mask]
    right_idx = idx[~mask]
    return {
        "feature": feature,
        "threshold": threshold,
        "left": grow(
            x, y, left_idx, n_classes, depth + 1, max_depth, min_samples_split,
            feature_rng, max_features,
        ),
        "right": grow(
            x, y, right_idx, n_classes, depth + 1, max_depth, min_samples_split,
            feature_rng, max_features,
        ),
    }


def fit(params: DTParams, x: np.ndarray, y: np.ndarray, n_classes: int, seed: int) -> dict:
    root = grow(
        x, y, np.arange(len(x)), n_classes,
        depth=0, max_depth=params.max_depth, min_samples_split=params.min_samples_split,
    )
    return {"tree": root}


def predict_tree(root: dict, x: np.ndarray) -> np.ndarray:
    out = np.empty(len(x), dtype=np.int64)

    def walk(node: dict, rows: np.ndarray):
        if "label" in node:
            out[rows] = node["label"]
            return
        mask = x[rows, node["feature"]] <= node["threshold"]
        walk(node["left"], rows[mask])
        walk(node["right"], rows[~mask])

    walk(root, np.arange(len(x)))
    return out


def leaf_paths(root: dict, x: np.ndarray) -> list[str]:
    """Per-row root-to-leaf path strings; handy for structural comparisons."""
    out = [""] * len(x)

    def walk(node: dict, rows: np.ndarray, path: str):
        if "label" in node:
            for r in rows:
                out[r] = path
            return
        mask = x[rows, node["feature"]] <= node["threshold"]
        walk(node["left"], rows[mask], path + "L")
        walk(node["right"], rows[~mask], path + "R")

    walk(root, np.arange(len(x)), "")
    return out


def predict(state: dict, params: DTParams, x: np.ndarray, n_classes: int) -> np.ndarray:
    return predict_tree(state["tree"], x)


def state_to_json(state: dict) -> dict:
    return {"tree": state["tree"]}


def state_from_json(d: dict) -> dict:
    return {"tree": d["tree"]}
