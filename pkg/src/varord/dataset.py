"""Problem records, dataset I/O, labeling, splits, and synthetic generation.

A record carries a polynomial system (or just its features once featurized),
the per-ordering cost vector ("timings", proxy cost units or seconds, +inf
for timeouts), the induced class label, and its symmetry lineage: orbit_id is
shared by all permuted variants of a root problem and perm records which
variant this is.

Two on-disk formats:

* problems.jsonl -- one JSON object per line with id, orbit_id, perm (image
  list), system (grammar text), and optionally timings/label/tie.  Infinite
  timings are encoded as the string "inf".
* dataset.csv    -- header id,orbit_id,perm,f1..f11[,t0..t5],label,tie with
  "." decimals and "inf" for infinity; the timings block is optional.

All randomness is driven by explicit integer seeds recorded in provenance.
"""
from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .cadcost import rank_orderings
from .features import FeatureVector, extract_features
from .polysys import PolySystem, Polynomial, VarPermutation, format_system, n_labels, parse_system


class SchemaError(ValueError):
    """Malformed dataset file; message carries the offending row/line number."""


def derive_seed(seed: int, index: int) -> int:
    """Stable per-item seed stream; avoids Python's salted hash()."""
    return (seed * 0x9E3779B97F4A7C15 + index * 0xBF58476D1CE4E5B9 + 1) % (1 << 63)


@dataclass(frozen=True)
class ProblemRecord:
    id: str
    orbit_id: str
    perm: VarPermutation
    system: PolySystem | None = None
    features: FeatureVector | None = None
    timings: tuple[float, ...] | None = None
    label: int | None = None
    tie: bool | None = None

    def __post_init__(self):
        if self.timings is not None:
            object.__setattr__(self, "timings", tuple(float(t) for t in self.timings))
            if self.label is not None and self.timings[self.label] != min(self.timings):
                raise ValueError(f"record {self.id}: label {self.label} is not a cost minimizer")

    @property
    def nvars(self) -> int:
        return self.perm.n


@dataclass(frozen=True)
class Dataset:
    """Immutable snapshot of records; provenance is metadata, not identity."""

    records: tuple[ProblemRecord, ...]
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("record ids must be unique")
        nv = {r.nvars for r in self.records}
        if len(nv) > 1:
            raise ValueError("all records must share the variable count")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def nvars(self) -> int:
        return self.records[0].nvars if self.records else 3


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float
    seed: int
    mode: str = "random"  # "random" | "orbit"

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise ValueError("test_fraction must lie in (0, 1)")
        if self.mode not in ("random", "orbit"):
            raise ValueError(f"unknown split mode {self.mode!r}")


def label_from_timings(timings: Sequence[float]) -> tuple[int, bool]:
    """Argmin label with lowest-label tie-break; tie flags a non-unique minimum."""
    timings = [float(t) for t in timings]
    best = min(timings)
    if math.isinf(best):
        raise ValueError("all orderings timed out; record must be dropped")
    label = timings.index(best)
    tie = timings.count(best) >= 2
    return label, tie


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Deterministic disjoint train/test partition.

    Test size is floor(N * test_fraction).  Orbit mode assigns whole orbits to
    one side, landing as close to the target size as whole orbits allow.
    Record order within each side follows the input dataset.
    """
    records = dataset.records
    if len(records) < 2:
        raise ValueError("need at least two records to split")
    # exact decimal arithmetic: floor(10 * 0.3) must be 3, not floor(2.999...)
    target = int(Fraction(str(spec.test_fraction)) * len(records))
    rng = random.Random(derive_seed(spec.seed, 0))
    if spec.mode == "random":
        indices = list(range(len(records)))
        rng.shuffle(indices)
        test_idx = set(indices[:target])
    else:
        orbit_order: list[str] = []
        members: dict[str, list[int]] = {}
        for i, r in enumerate(records):
            if r.orbit_id not in members:
                orbit_order.append(r.orbit_id)
                members[r.orbit_id] = []
            members[r.orbit_id].append(i)
        rng.shuffle(orbit_order)
        test_idx = set()
        size = 0
        for orbit in orbit_order:
            took = members[orbit]
            if size >= target:
                break
            if abs(size + len(took) - target) <= abs(size - target):
                test_idx.update(took)
                size += len(took)
    test = [r for i, r in enumerate(records) if i in test_idx]
    train = [r for i, r in enumerate(records) if i not in test_idx]
    meta = {"split": {"test_fraction": spec.test_fraction, "seed": spec.seed, "mode": spec.mode}}
    return (
        Dataset(tuple(train), {**dataset.provenance, **meta, "side": "train"}),
        Dataset(tuple(test), {**dataset.provenance, **meta, "side": "test"}),
    )


def orbit_leakage(train: Dataset, test: Dataset) -> float:
    """Fraction of test records with an orbit-mate in the training side."""
    if not test.records:
        return 0.0
    train_orbits = {r.orbit_id for r in train.records}
    hits = sum(1 for r in test.records if r.orbit_id in train_orbits)
    return hits / len(test.records)


# -- synthetic generation ------------------------------------------------------

@dataclass(frozen=True)
class GeneratorConfig:
    """Bounds for random system generation; validity caps are hard limits."""

    n_records: int = 1200
    min_polys: int = 1
    max_polys: int = 3
    min_terms: int = 1
    max_terms: int = 3
    max_degree: int = 2  # per-variable exponent bound
    coeff_bound: int = 99  # coefficients drawn from +-[1..bound]
    nvars: int = 3

    def __post_init__(self):
        ok = (
            self.n_records >= 1
            and 1 <= self.min_polys <= self.max_polys <= 4
            and 1 <= self.min_terms <= self.max_terms <= 6
            and 1 <= self.max_degree <= 4
            and 1 <= self.coeff_bound <= 99
            and self.nvars == 3
        )
        if not ok:
            raise ValueError("invalid generator bounds")

    def to_json_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "min_polys": self.min_polys,
            "max_polys": self.max_polys,
            "min_terms": self.min_terms,
            "max_terms": self.max_terms,
            "max_degree": self.max_degree,
            "coeff_bound": self.coeff_bound,
            "nvars": self.nvars,
        }


def _random_system(rng: random.Random, cfg: GeneratorConfig) -> PolySystem:
    n = cfg.nvars
    while True:
        polys = []
        for _ in range(rng.randint(cfg.min_polys, cfg.max_polys)):
            while True:
                terms: dict = {}
                for _ in range(rng.randint(cfg.min_terms, cfg.max_terms)):
                    mono = tuple(rng.randint(0, cfg.max_degree) for _ in range(n))
                    coeff = rng.randint(1, cfg.coeff_bound) * rng.choice((1, -1))
                    terms[mono] = terms.get(mono, 0) + coeff
                p = Polynomial(n, terms)
                if not p.is_zero():
                    polys.append(p)
                    break
        system = PolySystem(tuple(polys), n)
        if all(any(p.degree_in(v) > 0 for p in polys) for v in range(n)):
            return system


def generate_synthetic(cfg: GeneratorConfig, seed: int) -> Dataset:
    """Random labeled roots: systems using all variables, costs from the proxy oracle.

    Timings hold each ordering's total sotd; label and tie follow from
    label_from_timings.  Records are orbit roots (perm = identity, orbit_id =
    id).  Deterministic per seed, record by record.
    """
    records = []
    identity = VarPermutation.identity(cfg.nvars)
    for i in range(cfg.n_records):
        rng = random.Random(derive_seed(seed, i))
        system = _random_system(rng, cfg)
        table = rank_orderings(system)
        timings = tuple(float(c.total_sotd) for c in table.costs)
        label, tie = label_from_timings(timings)
        rid = f"syn{i:05d}"
        records.append(
            ProblemRecord(
                id=rid,
                orbit_id=rid,
                perm=identity,
                system=system,
                features=extract_features(system),
                timings=timings,
                label=label,
                tie=tie,
            )
        )
    provenance = {"source": "generate_synthetic", "seed": seed, "config": cfg.to_json_dict()}
    return Dataset(tuple(records), provenance)


def bias_subsample(
    dataset: Dataset, target: Sequence[float], size: int, seed: int
) -> Dataset:
    """Stratified subsample matching target class proportions.

    Class quotas come from largest-remainder rounding of size * target;
    sampling within each class is seeded and without replacement.  Raises if
    any class lacks enough records.  Output preserves dataset record order.
    """
    k = n_labels(dataset.nvars)
    if len(target) != k:
        raise ValueError(f"target must have {k} proportions")
    if any(p < 0 for p in target):
        raise ValueError("target proportions must be non-negative")
    if abs(sum(target) - 1.0) > 1e-9:
        raise ValueError("target proportions must sum to 1")
    if size < 1:
        raise ValueError("size must be positive")
    quotas = _largest_remainder(target, size)
    by_class: dict[int, list[int]] = {c: [] for c in range(k)}
    for i, r in enumerate(dataset.records):
        if r.label is None:
            raise ValueError(f"record {r.id} has no label")
        by_class[r.label].append(i)
    rng = random.Random(derive_seed(seed, 1))
    chosen: list[int] = []
    for c in range(k):
        pool = by_class[c]
        if quotas[c] > len(pool):
            raise ValueError(
                f"class {c} has {len(pool)} records, need {quotas[c]} for the target skew"
            )
        chosen.extend(rng.sample(pool, quotas[c]))
    chosen.sort()
    meta = {
        "bias_subsample": {"target": [float(p) for p in target], "size": size, "seed": seed}
    }
    return Dataset(
        tuple(dataset.records[i] for i in chosen), {**dataset.provenance, **meta}
    )


def _largest_remainder(proportions: Sequence[float], size: int) -> list[int]:
    raw = [size * p for p in proportions]
    base = [math.floor(q) for q in raw]
    short = size - sum(base)
    order = sorted(range(len(raw)), key=lambda c: (-(raw[c] - base[c]), c))
    for c in order[:short]:
        base[c] += 1
    return base


# -- persistence ---------------------------------------------------------------

def _perm_to_text(perm: VarPermutation) -> str:
    return "-".join(str(v) for v in perm.image)


def _perm_from_text(text: str) -> VarPermutation:
    return VarPermutation(tuple(int(v) for v in text.split("-")))


def _timing_to_json(t: float):
    return "inf" if math.isinf(t) else t


def _timing_from_json(v) -> float:
    if v == "inf":
        return math.inf
    return float(v)


def save_dataset(dataset: Dataset, path: str | Path):
    """Write records to problems.jsonl or dataset.csv, chosen by suffix."""
    path = Path(path)
    if path.suffix == ".jsonl":
        _save_jsonl(dataset, path)
    elif path.suffix == ".csv":
        _save_csv(dataset, path)
    else:
        raise ValueError(f"unsupported dataset format {path.suffix!r}")


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    if path.suffix == ".jsonl":
        return _load_jsonl(path)
    if path.suffix == ".csv":
        return _load_csv(path)
    raise ValueError(f"unsupported dataset format {path.suffix!r}")


def _save_jsonl(dataset: Dataset, path: Path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in dataset.records:
            if r.system is None:
                raise ValueError(f"record {r.id} has no system; cannot write problems.jsonl")
            obj = {
                "id": r.id,
                "orbit_id": r.orbit_id,
                "perm": list(r.perm.image),
                "system": format_system(r.system),
            }
            if r.timings is not None:
                obj["timings"] = [_timing_to_json(t) for t in r.timings]
            if r.label is not None:
                obj["label"] = r.label
            if r.tie is not None:
                obj["tie"] = r.tie
            fh.write(json.dumps(obj, separators=(", ", ": ")) + "\n")


def _load_jsonl(path: Path) -> Dataset:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path.name} line {lineno}: invalid JSON ({exc})") from exc
            for key in ("id", "orbit_id", "perm", "system"):
                if key not in obj:
                    raise SchemaError(f"{path.name} line {lineno}: missing key {key!r}")
            try:
                system = parse_system(obj["system"])
                timings = obj.get("timings")
                records.append(
                    ProblemRecord(
                        id=str(obj["id"]),
                        orbit_id=str(obj["orbit_id"]),
                        perm=VarPermutation(tuple(obj["perm"])),
                        system=system,
                        features=extract_features(system),
                        timings=tuple(_timing_from_json(t) for t in timings)
                        if timings is not None
                        else None,
                        label=obj.get("label"),
                        tie=obj.get("tie"),
                    )
                )
            except ValueError as exc:
                raise SchemaError(f"{path.name} line {lineno}: {exc}") from exc
    return Dataset(tuple(records), {"source": str(path)})


def _csv_header(n_features: int, with_timings: bool, n_timings: int) -> list[str]:
    cols = ["id", "orbit_id", "perm"] + [f"f{i + 1}" for i in range(n_features)]
    if with_timings:
        cols += [f"t{i}" for i in range(n_timings)]
    return cols + ["label", "tie"]


def _save_csv(dataset: Dataset, path: Path):
    records = dataset.records
    if not records:
        raise ValueError("refusing to write an empty dataset")
    n_features = len(records[0].features or ())
    if n_features == 0:
        raise ValueError("records must be featurized before CSV export")
    with_timings = any(r.timings is not None for r in records)
    n_timings = n_labels(dataset.nvars)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_csv_header(n_features, with_timings, n_timings))
        for r in records:
            if r.features is None or len(r.features) != n_features:
                raise ValueError(f"record {r.id} has inconsistent features")
            row = [r.id, r.orbit_id, _perm_to_text(r.perm)]
            row += [repr(float(v)) for v in r.features]
            if with_timings:
                if r.timings is None:
                    row += [""] * n_timings
                else:
                    row += [repr(float(t)) for t in r.timings]
            row.append("" if r.label is None else str(r.label))
            row.append("" if r.tie is None else str(int(r.tie)))
            writer.writerow(row)


def _load_csv(path: Path) -> Dataset:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path.name}: empty file") from None
        n_features = sum(1 for c in header if c.startswith("f") and c[1:].isdigit())
        timing_cols = [c for c in header if c.startswith("t") and c[1:].isdigit()]
        expected = _csv_header(n_features, bool(timing_cols), len(timing_cols))
        for col in expected:
            if col not in header:
                raise SchemaError(f"{path.name}: missing column {col!r}")
        index = {c: header.index(c) for c in expected}
        records = []
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                features = tuple(
                    float(row[index[f"f{i + 1}"]]) for i in range(n_features)
                )
                timings = None
                if timing_cols:
                    cells = [row[index[c]] for c in timing_cols]
                    if any(cells):
                        timings = tuple(float(c) for c in cells)
                label_cell = row[index["label"]]
                tie_cell = row[index["tie"]]
                records.append(
                    ProblemRecord(
                        id=row[index["id"]],
                        orbit_id=row[index["orbit_id"]],
                        perm=_perm_from_text(row[index["perm"]]),
                        features=features,
                        timings=timings,
                        label=int(label_cell) if label_cell else None,
                        tie=bool(int(tie_cell)) if tie_cell else None,
                    )
                )
            except (ValueError, IndexError) as exc:
                raise SchemaError(f"{path.name} row {rowno}: {exc}") from exc
    return Dataset(tuple(records), {"source": str(path)})
