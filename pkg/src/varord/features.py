"""Per-system feature extraction and train-set standardization.

For an n-variable system the feature vector has 2 + 3n entries (11 when n=3):

    [num_polys, max_total_degree,
     maxdeg_x1..maxdeg_xn,
     polyprop_x1..polyprop_xn,
     monoprop_x1..monoprop_xn]

where polyprop_xi is the fraction of polynomials in which xi occurs with
positive degree and monoprop_xi the fraction of monomials (constant terms
included in the denominator) in which xi occurs.  Permuting the system's
variables permutes each xi-indexed triplet and leaves the first two entries
unchanged, which the test suite checks exhaustively.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .polysys import PolySystem

FeatureVector = tuple[float, ...]


def feature_names(nvars: int = 3) -> list[str]:
    """CSV column names f1..f{2+3n}."""
    return [f"f{i + 1}" for i in range(2 + 3 * nvars)]


def extract_features(system: PolySystem) -> FeatureVector:
    """Compute the feature vector of a system; exact counts, float-encoded."""
    polys = system.polys
    n = system.nvars
    num_polys = len(polys)
    max_total = max(p.total_degree() for p in polys)
    maxdeg = [max(p.degree_in(v) for p in polys) for v in range(n)]
    poly_hits = [sum(1 for p in polys if p.degree_in(v) > 0) for v in range(n)]
    total_monomials = sum(len(p.terms) for p in polys)
    mono_hits = [
        sum(1 for p in polys for m, _ in p.terms if m[v] > 0) for v in range(n)
    ]
    values = (
        [float(num_polys), float(max_total)]
        + [float(d) for d in maxdeg]
        + [hits / num_polys for hits in poly_hits]
        + [hits / total_monomials for hits in mono_hits]
    )
    return tuple(values)


@dataclass(frozen=True)
class Scaler:
    """Per-column mean/population-std transform fitted on training rows.

    Columns with zero spread are shifted to zero and left unscaled (std
    treated as 1), so constant features cannot blow up.
    """

    means: tuple[float, ...]
    stds: tuple[float, ...]

    def __post_init__(self):
        if len(self.means) != len(self.stds):
            raise ValueError("means and stds must have equal length")
        if any(s < 0 for s in self.stds):
            raise ValueError("negative standard deviation")

    def to_json_dict(self) -> dict:
        return {"means": list(self.means), "stds": list(self.stds)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "Scaler":
        return cls(means=tuple(d["means"]), stds=tuple(d["stds"]))


def fit_scaler(rows: Sequence[Sequence[float]] | np.ndarray) -> Scaler:
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("fit_scaler requires at least one row")
    means = x.mean(axis=0)
    stds = x.std(axis=0)  # population std: divide by the row count
    return Scaler(means=tuple(float(v) for v in means), stds=tuple(float(v) for v in stds))


def apply_scaler(scaler: Scaler, vec: Sequence[float]) -> FeatureVector:
    if len(vec) != len(scaler.means):
        raise ValueError(
            f"dimension mismatch: vector has {len(vec)} entries, scaler has {len(scaler.means)}"
        )
    out = []
    for v, m, s in zip(vec, scaler.means, scaler.stds):
        out.append((v - m) / (s if s != 0 else 1.0))
    return tuple(out)


def transform_matrix(scaler: Scaler, rows: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    """Vectorized apply_scaler for model training paths."""
    x = np.asarray(rows, dtype=float)
    if x.shape[1] != len(scaler.means):
        raise ValueError("dimension mismatch")
    stds = np.where(np.asarray(scaler.stds) == 0, 1.0, np.asarray(scaler.stds))
    return (x - np.asarray(scaler.means)) / stds
