"""Classifier training, prediction, cross-validation, grid search, persistence.

Five families are implemented natively (numpy only): k-NN, decision tree,
random forest, one-vs-rest SVM, and an MLP.  Every entry point is
deterministic given its seed; prediction ties always resolve to the lowest
label.  Feature matrices are expected pre-scaled; models optionally carry the
scaler they were trained behind so callers can transform raw features.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..dataset import derive_seed
from ..features import Scaler
from . import forest, knn, mlp, svm, tree
from .params import (
    DEFAULT_GRIDS,
    FAMILIES,
    DTParams,
    Hyperparams,
    KNNParams,
    MLPParams,
    RFParams,
    SVMParams,
    family_of,
    params_from_dict,
    params_to_dict,
)

_IMPL = {"knn": knn, "dt": tree, "rf": forest, "svm": svm, "mlp": mlp}

SCHEMA_VERSION = 1


@dataclass
class TrainedModel:
    family: str
    params: Hyperparams
    state: dict
    n_classes: int
    seed: int
    scaler: Scaler | None = None


def _as_matrix(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    return arr


def train(
    family: str,
    params: Hyperparams,
    x,
    y,
    seed: int,
    n_classes: int | None = None,
    scaler: Scaler | None = None,
) -> TrainedModel:
    """Fit one classifier; deterministic in (inputs, params, seed)."""
    if family not in _IMPL:
        raise ValueError(f"unknown model family {family!r}")
    if family_of(params) != family:
        raise ValueError(f"hyperparameters {params} do not belong to family {family!r}")
    x = _as_matrix(x)
    y = np.asarray(y, dtype=np.int64)
    if len(x) == 0:
        raise ValueError("empty training set")
    if len(x) != len(y):
        raise ValueError("feature/label length mismatch")
    if y.min() < 0:
        raise ValueError("labels must be non-negative")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    state = _IMPL[family].fit(params, x, y, n_classes, seed)
    return TrainedModel(
        family=family, params=params, state=state, n_classes=n_classes, seed=seed,
        scaler=scaler,
    )


def predict(model: TrainedModel, x):
    """Predict labels for a matrix, or a single label for one feature vector."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    out = _IMPL[model.family].predict(model.state, model.params, _as_matrix(arr), model.n_classes)
    return int(out[0]) if single else out


def accuracy(model: TrainedModel, x, y) -> float:
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0:
        raise ValueError("empty evaluation set")
    return float((predict(model, _as_matrix(x)) == y).mean())


def random_baseline_accuracy(y, n_classes: int, seed: int) -> float:
    """Accuracy of a uniform random predictor; the floor every model must beat."""
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0:
        raise ValueError("empty evaluation set")
    rng = random.Random(seed)
    hits = sum(1 for label in y if rng.randrange(n_classes) == label)
    return hits / len(y)


# -- cross-validation and grid search -----------------------------------------

@dataclass(frozen=True)
class CVResult:
    mean: float
    folds: tuple[float, ...]


@dataclass(frozen=True)
class GridEntry:
    params: Hyperparams
    cv: CVResult


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Shuffled partition into k folds with sizes differing by at most one."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError("k exceeds the sample count")
    indices = list(range(n))
    random.Random(derive_seed(seed, 0)).shuffle(indices)
    base = n // k
    extra = n % k
    folds = []
    start = 0
    for f in range(k):
        size = base + (1 if f < extra else 0)
        folds.append(np.array(indices[start : start + size], dtype=np.int64))
        start += size
    return folds


def cross_validate(
    family: str,
    params: Hyperparams,
    x,
    y,
    k: int = 5,
    seed: int = 0,
    n_classes: int | None = None,
) -> CVResult:
    """Mean and per-fold accuracy; each fold is the held-out set exactly once."""
    x = _as_matrix(x)
    y = np.asarray(y, dtype=np.int64)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    folds = kfold_indices(len(x), k, seed)
    scores = []
    for f, test_idx in enumerate(folds):
        mask = np.ones(len(x), dtype=bool)
        mask[test_idx] = False
        model = train(
            family, params, x[mask], y[mask], seed=derive_seed(seed, f + 1),
            n_classes=n_classes,
        )
        scores.append(accuracy(model, x[test_idx], y[test_idx]))
    return CVResult(mean=float(np.mean(scores)), folds=tuple(scores))


def grid_search(
    family: str,
    grid: Sequence[Hyperparams],
    x,
    y,
    k: int = 5,
    seed: int = 0,
    n_classes: int | None = None,
) -> tuple[Hyperparams, tuple[GridEntry, ...]]:
    """Best hyperparameters by mean CV accuracy; earliest grid entry wins ties."""
    grid = tuple(grid)
    if not grid:
        raise ValueError("empty hyperparameter grid")
    table = []
    best = None
    for params in grid:
        cv = cross_validate(family, params, x, y, k=k, seed=seed, n_classes=n_classes)
        table.append(GridEntry(params=params, cv=cv))
        if best is None or cv.mean > best[1]:
            best = (params, cv.mean)
    return best[0], tuple(table)


# -- persistence ---------------------------------------------------------------

class ModelFormatError(ValueError):
    """Model file is unreadable or from an unsupported schema version."""


def model_to_json_dict(model: TrainedModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "family": model.family,
        "params": params_to_dict(model.params),
        "n_classes": model.n_classes,
        "seed": model.seed,
        "scaler": model.scaler.to_json_dict() if model.scaler else None,
        "state": _IMPL[model.family].state_to_json(model.state),
    }


def model_from_json_dict(d: dict) -> TrainedModel:
    version = d.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ModelFormatError(
            f"unsupported model schema_version {version!r}; expected {SCHEMA_VERSION}"
        )
    family = d["family"]
    if family not in _IMPL:
        raise ModelFormatError(f"unknown model family {family!r}")
    return TrainedModel(
        family=family,
        params=params_from_dict(family, d["params"]),
        state=_IMPL[family].state_from_json(d["state"]),
        n_classes=d["n_classes"],
        seed=d["seed"],
        scaler=Scaler.from_json_dict(d["scaler"]) if d.get("scaler") else None,
    )


def save_model(model: TrainedModel, path):
    import json

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(model_to_json_dict(model), fh)
        fh.write("\n")


def load_model(path) -> TrainedModel:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"corrupt model file: {exc}") from exc
    return model_from_json_dict(payload)
