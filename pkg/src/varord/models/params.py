"""Hyperparameter dataclasses for the five classifier families."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class KNNParams:
    k: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")


@dataclass(frozen=True)
class DTParams:
    max_depth: int | None = None
    min_samples_split: int = 2

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be positive or None")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be at least 2")


@dataclass(frozen=True)
class RFParams:
    n_trees: int = 100
    max_features: str = "sqrt"  # "sqrt" | "all"
    max_depth: int | None = None

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be positive")
        if self.max_features not in ("sqrt", "all"):
            raise ValueError("max_features must be 'sqrt' or 'all'")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be positive or None")


@dataclass(frozen=True)
class SVMParams:
    C: float = 1.0
    gamma: float | str = "scale"
    kernel: str = "rbf"  # "rbf" | "linear"

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if isinstance(self.gamma, str):
            if self.gamma != "scale":
                raise ValueError("gamma must be positive or 'scale'")
        elif self.gamma <= 0:
            raise ValueError("gamma must be positive or 'scale'")
        if self.kernel not in ("rbf", "linear"):
            raise ValueError("kernel must be 'rbf' or 'linear'")


@dataclass(frozen=True)
class MLPParams:
    hidden_sizes: tuple[int, ...] = (32,)
    learning_rate: float = 1e-2
    epochs: int = 200
    batch_size: int = 32

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(self.hidden_sizes))
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ValueError("hidden_sizes must be non-empty positive integers")
        if self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("learning_rate, epochs, and batch_size must be positive")


Hyperparams = KNNParams | DTParams | RFParams | SVMParams | MLPParams

PARAM_TYPES: dict[str, type] = {
    "knn": KNNParams,
    "dt": DTParams,
    "rf": RFParams,
    "svm": SVMParams,
    "mlp": MLPParams,
}

FAMILIES = tuple(PARAM_TYPES)


def params_to_dict(params: Hyperparams) -> dict:
    if isinstance(params, KNNParams):
        return {"k": params.k}
    if isinstance(params, DTParams):
        return {"max_depth": params.max_depth, "min_samples_split": params.min_samples_split}
    if isinstance(params, RFParams):
        return {
            "n_trees": params.n_trees,
            "max_features": params.max_features,
            "max_depth": params.max_depth,
        }
    if isinstance(params, SVMParams):
        return {"C": params.C, "gamma": params.gamma, "kernel": params.kernel}
    if isinstance(params, MLPParams):
        return {
            "hidden_sizes": list(params.hidden_sizes),
            "learning_rate": params.learning_rate,
            "epochs": params.epochs,
            "batch_size": params.batch_size,
        }
    raise TypeError(f"unknown hyperparameter type {type(params).__name__}")


def params_from_dict(family: str, d: dict) -> Hyperparams:
    if family not in PARAM_TYPES:
        raise ValueError(f"unknown model family {family!r}")
    d = dict(d)
    if family == "mlp" and "hidden_sizes" in d:
        d["hidden_sizes"] = tuple(d["hidden_sizes"])
    return PARAM_TYPES[family](**d)


def family_of(params: Hyperparams) -> str:
    for fam, cls in PARAM_TYPES.items():
        if isinstance(params, cls):
            return fam
    raise TypeError(f"unknown hyperparameter type {type(params).__name__}")


# Default search grids; declared configuration, overridable everywhere.
DEFAULT_GRIDS: dict[str, tuple] = {
    "knn": tuple(KNNParams(k) for k in (1, 3, 5, 7, 11, 15)),
    "dt": tuple(
        DTParams(depth, mss) for depth in (3, 5, 8, 12, None) for mss in (2, 5, 10)
    ),
    "rf": tuple(
        RFParams(n, mf) for n in (50, 100, 200) for mf in ("sqrt", "all")
    ),
    "svm": tuple(
        SVMParams(c, g, k)
        for c in (0.1, 1.0, 10.0, 100.0)
        for g in (0.01, 0.1, 1.0, "scale")
        for k in ("rbf", "linear")
    ),
    "mlp": tuple(
        MLPParams(h, lr) for h in ((16,), (32,), (64, 32)) for lr in (1e-2, 1e-3)
    ),
}
