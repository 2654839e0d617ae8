"""Experiment harness: cross-dataset evaluation and the bias/leakage study.

The central protocol trains every classifier family on one dataset's training
split (grid search with k-fold CV, scaler fitted on that split alone) and
reports accuracy on its own training split, its held-out split, and ALL of
the other dataset, then repeats in the mirrored direction.  The bias study
manufactures the two datasets from one synthetic root pool: a skew-sampled
biased dataset and its symmetry-augmented balanced superset, evaluated under
both random and orbit-aware splits so the leakage difference is visible.

Everything is deterministic per seed, and every report embeds the seeds,
grids, and split specs needed to reproduce it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .augment import augment_dataset, class_distribution, imbalance_ratio
from .dataset import (
    Dataset,
    GeneratorConfig,
    SplitSpec,
    bias_subsample,
    derive_seed,
    generate_synthetic,
    orbit_leakage,
    save_dataset,
    split,
)
from .features import fit_scaler, transform_matrix
from .models import (
    TrainedModel,
    accuracy,
    grid_search,
    params_from_dict,
    params_to_dict,
    random_baseline_accuracy,
    train,
)
from .models.params import (
    DTParams,
    FAMILIES,
    Hyperparams,
    KNNParams,
    MLPParams,
    RFParams,
    SVMParams,
)
from .polysys import n_labels

# Per-class counts mirroring the skewed benchmark distribution the bias
# subsampler imitates (ratio max/min ~= 4.58); the interior classes are
# configuration values, only the endpoints are anchored.
SKEWED_CLASS_COUNTS = (580, 900, 1100, 800, 858, 2657)
SKEWED_TARGET = tuple(c / sum(SKEWED_CLASS_COUNTS) for c in SKEWED_CLASS_COUNTS)

# Compact search grids sized for the study's runtime budget; the full model
# grids in models.DEFAULT_GRIDS remain available via configuration.  Tree
# depths are small because the biased dataset holds only a few hundred rows,
# where CV prefers the shallow settings anyway.
STUDY_GRIDS: dict[str, tuple[Hyperparams, ...]] = {
    "knn": (KNNParams(k=1), KNNParams(k=5)),
    "dt": (DTParams(max_depth=3), DTParams(max_depth=5)),
    "rf": (RFParams(n_trees=15, max_features="sqrt", max_depth=8),),
    "svm": (SVMParams(C=10.0, gamma="scale", kernel="rbf"),),
    "mlp": (MLPParams(hidden_sizes=(32,), learning_rate=1e-2, epochs=120, batch_size=32),),
}


@dataclass(frozen=True)
class ExperimentConfig:
    families: tuple[str, ...] = FAMILIES
    grids: dict[str, tuple[Hyperparams, ...]] = field(default_factory=lambda: dict(STUDY_GRIDS))
    test_fraction: float = 0.2
    split_mode: str = "random"
    cv_folds: int = 5

    def __post_init__(self):
        for fam in self.families:
            if fam not in FAMILIES:
                raise ValueError(f"unknown model family {fam!r}")
            if fam not in self.grids or not self.grids[fam]:
                raise ValueError(f"no hyperparameter grid for family {fam!r}")


@dataclass(frozen=True)
class StudyConfig:
    n_roots: int = 1200
    generator: GeneratorConfig = field(default_factory=lambda: GeneratorConfig(n_records=1200))
    bias_target: tuple[float, ...] = SKEWED_TARGET
    bias_size: int | None = None  # None: largest size the pool supports (98%)
    split_modes: tuple[str, ...] = ("random", "orbit")
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)

    def __post_init__(self):
        if self.n_roots != self.generator.n_records:
            object.__setattr__(
                self,
                "generator",
                GeneratorConfig(**{**self.generator.to_json_dict(), "n_records": self.n_roots}),
            )


@dataclass(frozen=True)
class ModelRow:
    family: str
    params: Hyperparams | None  # None for the random baseline
    cv_mean: float
    train_accuracy: float
    test_accuracy: float
    cross_accuracy: float


@dataclass(frozen=True)
class DirectionReport:
    train_dataset: str
    eval_dataset: str
    rows: tuple[ModelRow, ...]
    baseline: ModelRow
    leakage: float
    cross_overlap: float


@dataclass(frozen=True)
class ExperimentReport:
    directions: tuple[DirectionReport, DirectionReport]
    metadata: dict

    def to_json_dict(self) -> dict:
        return {
            "directions": [
                {
                    "train_dataset": d.train_dataset,
                    "eval_dataset": d.eval_dataset,
                    "leakage": d.leakage,
                    "cross_overlap": d.cross_overlap,
                    "rows": [
                        {
                            "family": r.family,
                            "params": params_to_dict(r.params),
                            "cv_mean": r.cv_mean,
                            "train_accuracy": r.train_accuracy,
                            "test_accuracy": r.test_accuracy,
                            "cross_accuracy": r.cross_accuracy,
                        }
                        for r in d.rows
                    ],
                    "baseline": {
                        "train_accuracy": d.baseline.train_accuracy,
                        "test_accuracy": d.baseline.test_accuracy,
                        "cross_accuracy": d.baseline.cross_accuracy,
                    },
                }
                for d in self.directions
            ],
            "metadata": self.metadata,
        }


def dataset_matrix(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix and label vector; every record must be featurized+labeled."""
    feats, labels = [], []
    for r in dataset.records:
        if r.features is None or r.label is None:
            raise ValueError(f"record {r.id} lacks features or label")
        feats.append(r.features)
        labels.append(r.label)
    return np.asarray(feats, dtype=float), np.asarray(labels, dtype=np.int64)


def _require_all_classes(y: np.ndarray, n_classes: int, name: str):
    present = set(int(v) for v in y)
    missing = sorted(set(range(n_classes)) - present)
    if missing:
        raise ValueError(f"classes {missing} missing from the {name} training split")


def _one_direction(
    name_train: str,
    name_eval: str,
    d_train_full: Dataset,
    d_eval_full: Dataset,
    cfg: ExperimentConfig,
    seed: int,
) -> DirectionReport:
    n_classes = n_labels(d_train_full.nvars)
    spec = SplitSpec(cfg.test_fraction, seed=derive_seed(seed, 11), mode=cfg.split_mode)
    train_ds, test_ds = split(d_train_full, spec)
    x_train_raw, y_train = dataset_matrix(train_ds)
    x_test_raw, y_test = dataset_matrix(test_ds)
    x_cross_raw, y_cross = dataset_matrix(d_eval_full)
    _require_all_classes(y_train, n_classes, name_train)

    scaler = fit_scaler(x_train_raw)
    x_train = transform_matrix(scaler, x_train_raw)
    x_test = transform_matrix(scaler, x_test_raw)
    # deploying across datasets keeps the training scaler
    x_cross = transform_matrix(scaler, x_cross_raw)

    rows = []
    for f_idx, family in enumerate(cfg.families):
        fam_seed = derive_seed(seed, 100 + f_idx)
        best, table = grid_search(
            family, cfg.grids[family], x_train, y_train,
            k=cfg.cv_folds, seed=fam_seed, n_classes=n_classes,
        )
        best_cv = next(e.cv.mean for e in table if e.params == best)
        model = train(
            family, best, x_train, y_train, seed=derive_seed(fam_seed, 1),
            n_classes=n_classes, scaler=scaler,
        )
        rows.append(
            ModelRow(
                family=family,
                params=best,
                cv_mean=best_cv,
                train_accuracy=accuracy(model, x_train, y_train),
                test_accuracy=accuracy(model, x_test, y_test),
                cross_accuracy=accuracy(model, x_cross, y_cross),
            )
        )
    base_seed = derive_seed(seed, 999)
    baseline = ModelRow(
        family="random",
        params=None,
        cv_mean=float("nan"),
        train_accuracy=random_baseline_accuracy(y_train, n_classes, derive_seed(base_seed, 0)),
        test_accuracy=random_baseline_accuracy(y_test, n_classes, derive_seed(base_seed, 1)),
        cross_accuracy=random_baseline_accuracy(y_cross, n_classes, derive_seed(base_seed, 2)),
    )
    train_orbits = {r.orbit_id for r in train_ds.records}
    overlap = (
        sum(1 for r in d_eval_full.records if r.orbit_id in train_orbits) / len(d_eval_full)
        if len(d_eval_full)
        else 0.0
    )
    return DirectionReport(
        train_dataset=name_train,
        eval_dataset=name_eval,
        rows=tuple(rows),
        baseline=baseline,
        leakage=orbit_leakage(train_ds, test_ds),
        cross_overlap=overlap,
    )


def run_experiment(
    dataset_a: Dataset,
    dataset_b: Dataset,
    cfg: ExperimentConfig,
    seed: int,
    names: tuple[str, str] = ("A", "B"),
) -> ExperimentReport:
    """Grid-search, train, and evaluate every family in both directions."""
    dir_ab = _one_direction(names[0], names[1], dataset_a, dataset_b, cfg, derive_seed(seed, 1))
    dir_ba = _one_direction(names[1], names[0], dataset_b, dataset_a, cfg, derive_seed(seed, 2))
    metadata = {
        "datasets": {
            names[0]: {"size": len(dataset_a)},
            names[1]: {"size": len(dataset_b)},
        },
        "split": {"test_fraction": cfg.test_fraction, "mode": cfg.split_mode},
        "cv_folds": cfg.cv_folds,
        "seed": seed,
        "families": list(cfg.families),
        "grids": {
            fam: [params_to_dict(p) for p in cfg.grids[fam]] for fam in cfg.families
        },
    }
    return ExperimentReport(directions=(dir_ab, dir_ba), metadata=metadata)


# -- report files ----------------------------------------------------------------

def _fmt(x: float) -> str:
    return "nan" if isinstance(x, float) and math.isnan(x) else f"{x:.4f}"


def report_csv_text(report: ExperimentReport) -> str:
    lines = ["direction,family,cv_mean,train_accuracy,test_accuracy,cross_accuracy"]
    for d in report.directions:
        tag = f"{d.train_dataset}->{d.eval_dataset}"
        for r in d.rows:
            lines.append(
                f"{tag},{r.family},{_fmt(r.cv_mean)},{_fmt(r.train_accuracy)},"
                f"{_fmt(r.test_accuracy)},{_fmt(r.cross_accuracy)}"
            )
        b = d.baseline
        lines.append(
            f"{tag},random,,{_fmt(b.train_accuracy)},{_fmt(b.test_accuracy)},{_fmt(b.cross_accuracy)}"
        )
    return "\n".join(lines) + "\n"


def report_markdown_text(report: ExperimentReport) -> str:
    out = []
    for d in report.directions:
        out.append(f"## Models trained on {d.train_dataset}")
        out.append("")
        out.append(
            f"| Model | Training split ({d.train_dataset}) | Testing split ({d.train_dataset}) "
            f"| {d.eval_dataset} (all) |"
        )
        out.append("|---|---|---|---|")
        for r in d.rows:
            out.append(
                f"| {r.family} | {_fmt(r.train_accuracy)} | {_fmt(r.test_accuracy)} "
                f"| {_fmt(r.cross_accuracy)} |"
            )
        b = d.baseline
        out.append(
            f"| random | {_fmt(b.train_accuracy)} | {_fmt(b.test_accuracy)} | {_fmt(b.cross_accuracy)} |"
        )
        out.append("")
        out.append(
            f"split leakage: {_fmt(d.leakage)}; "
            f"share of {d.eval_dataset} with an orbit-mate in training: {_fmt(d.cross_overlap)}"
        )
        out.append("")
    return "\n".join(out)


def write_report(report: ExperimentReport, outdir: str | Path):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.csv").write_text(report_csv_text(report), encoding="utf-8")
    (outdir / "report.md").write_text(report_markdown_text(report), encoding="utf-8")
    with open(outdir / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_json_dict(), fh, indent=1)
        fh.write("\n")


# -- the bias study ----------------------------------------------------------------

@dataclass(frozen=True)
class StudyResult:
    reports: dict  # split mode -> ExperimentReport
    summary: dict


def auto_bias_size(pool: Dataset, target: Sequence[float]) -> int:
    """Largest subsample size (with 2% slack) every class of the pool can serve."""
    counts = class_distribution(pool).counts
    limit = min(
        counts[c] / p for c, p in enumerate(target) if p > 0
    )
    size = math.floor(0.98 * limit)
    if size < len(target):
        raise ValueError("root pool is too small for the requested skew")
    return size


def run_bias_study(cfg: StudyConfig, seed: int, outdir: str | Path | None = None) -> StudyResult:
    """Generate roots, build the biased and balanced datasets, run both split modes."""
    roots = generate_synthetic(cfg.generator, seed)
    balanced = augment_dataset(roots)
    bias_size = cfg.bias_size if cfg.bias_size is not None else auto_bias_size(roots, cfg.bias_target)
    biased = bias_subsample(roots, cfg.bias_target, bias_size, derive_seed(seed, 3))

    reports = {}
    for m_idx, mode in enumerate(cfg.split_modes):
        exp_cfg = ExperimentConfig(
            families=cfg.experiment.families,
            grids=cfg.experiment.grids,
            test_fraction=cfg.experiment.test_fraction,
            split_mode=mode,
            cv_folds=cfg.experiment.cv_folds,
        )
        reports[mode] = run_experiment(
            biased, balanced, exp_cfg, derive_seed(seed, 50 + m_idx),
            names=("biased", "balanced"),
        )

    biased_dist = class_distribution(biased)
    balanced_dist = class_distribution(balanced)
    summary = {
        "seed": seed,
        "n_roots": cfg.n_roots,
        "generator": cfg.generator.to_json_dict(),
        "bias_target": [float(p) for p in cfg.bias_target],
        "bias_size": bias_size,
        "biased_class_counts": list(biased_dist.counts),
        "biased_imbalance_ratio": imbalance_ratio(biased_dist),
        "balanced_class_counts": list(balanced_dist.counts),
        "balanced_imbalance_ratio": imbalance_ratio(balanced_dist),
        "root_tie_fraction": sum(1 for r in roots.records if r.tie) / len(roots),
        "split_modes": list(cfg.split_modes),
        "leakage": {
            mode: {
                "biased": reports[mode].directions[0].leakage,
                "balanced": reports[mode].directions[1].leakage,
            }
            for mode in cfg.split_modes
        },
    }
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        save_dataset(biased, outdir / "biased.csv")
        save_dataset(balanced, outdir / "balanced.csv")
        for mode in cfg.split_modes:
            write_report(reports[mode], outdir / mode)
        with open(outdir / "study.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary, fh, indent=1)
            fh.write("\n")
    return StudyResult(reports=reports, summary=summary)


# -- config file loading -------------------------------------------------------------

def _grids_from_json(obj: dict) -> dict[str, tuple[Hyperparams, ...]]:
    grids = dict(STUDY_GRIDS)
    for fam, entries in obj.items():
        grids[fam] = tuple(params_from_dict(fam, e) for e in entries)
    return grids


def experiment_config_from_json(obj: dict) -> ExperimentConfig:
    kwargs = {}
    if "families" in obj:
        kwargs["families"] = tuple(obj["families"])
    if "grids" in obj:
        kwargs["grids"] = _grids_from_json(obj["grids"])
    for key in ("test_fraction", "split_mode", "cv_folds"):
        if key in obj:
            kwargs[key] = obj[key]
    return ExperimentConfig(**kwargs)


def study_config_from_json(obj: dict) -> StudyConfig:
    kwargs = {}
    if "n_roots" in obj:
        kwargs["n_roots"] = obj["n_roots"]
    if "generator" in obj:
        gen = dict(obj["generator"])
        gen.setdefault("n_records", kwargs.get("n_roots", 1200))
        kwargs["generator"] = GeneratorConfig(**gen)
    elif "n_roots" in obj:
        kwargs["generator"] = GeneratorConfig(n_records=obj["n_roots"])
    if "bias_target" in obj:
        kwargs["bias_target"] = tuple(obj["bias_target"])
    if "bias_size" in obj:
        kwargs["bias_size"] = obj["bias_size"]
    if "split_modes" in obj:
        kwargs["split_modes"] = tuple(obj["split_modes"])
    kwargs["experiment"] = experiment_config_from_json(obj.get("experiment", {}))
    return StudyConfig(**kwargs)
