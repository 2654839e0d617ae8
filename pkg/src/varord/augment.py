"""Symmetry-based dataset augmentation and class-balance diagnostics.

Renaming the variables of a 3-variable problem leaves elimination cost
intact as long as the candidate orderings are renamed the same way, so every
root problem expands into an orbit of 6 equivalent records whose labels
sweep all six classes bijectively.  Augmenting a whole dataset of roots
therefore yields an exactly balanced class distribution of 6x the size, with
no deduplication even when a symmetric system produces coincident members.
"""
from __future__ import annotations

from dataclasses import dataclass

from .dataset import Dataset, ProblemRecord
from .features import extract_features
from .polysys import all_permutations, apply_permutation, n_labels, permute_label


@dataclass(frozen=True)
class ClassDistribution:
    counts: tuple[int, ...]
    total: int

    def __post_init__(self):
        if self.total != sum(self.counts):
            raise ValueError("total must equal the sum of counts")


def orbit(record: ProblemRecord) -> tuple[ProblemRecord, ...]:
    """Expand an orbit root into its 6 permuted variants.

    Permutations run in lexicographic order; the identity element equals the
    input record and keeps its id, other members get a "#<index>" suffix.
    Timings are reindexed so the entry at the permuted label equals the
    original entry at the source label, and features are recomputed from the
    permuted system.
    """
    if not record.perm.is_identity():
        raise ValueError(f"record {record.id} is not an orbit root")
    if record.perm.n != 3:
        raise ValueError("orbit expansion is defined for 3-variable problems")
    if record.system is None:
        raise ValueError(f"record {record.id} has no system to permute")
    members = []
    for index, sigma in enumerate(all_permutations(3)):
        if sigma.is_identity():
            members.append(record)
            continue
        system = apply_permutation(record.system, sigma)
        timings = None
        if record.timings is not None:
            reindexed = [0.0] * len(record.timings)
            for ell, t in enumerate(record.timings):
                reindexed[permute_label(ell, sigma)] = t
            timings = tuple(reindexed)
        members.append(
            ProblemRecord(
                id=f"{record.id}#{index}",
                orbit_id=record.orbit_id,
                perm=sigma,
                system=system,
                features=extract_features(system) if record.features is not None else None,
                timings=timings,
                label=None if record.label is None else permute_label(record.label, sigma),
                tie=record.tie,
            )
        )
    return tuple(members)


def augment_dataset(dataset: Dataset) -> Dataset:
    """Concatenate the orbits of every root; output size is exactly 6x input."""
    for r in dataset.records:
        if not r.perm.is_identity():
            raise ValueError(f"record {r.id} is not an orbit root; augment roots only")
    records = []
    for r in dataset.records:
        records.extend(orbit(r))
    meta = {**dataset.provenance, "augmented": {"group_order": 6, "roots": len(dataset)}}
    return Dataset(tuple(records), meta)


def class_distribution(dataset: Dataset) -> ClassDistribution:
    counts = [0] * n_labels(dataset.nvars)
    for r in dataset.records:
        if r.label is None:
            raise ValueError(f"record {r.id} has no label")
        counts[r.label] += 1
    return ClassDistribution(counts=tuple(counts), total=len(dataset))


def imbalance_ratio(dist: ClassDistribution) -> float:
    """Largest class count over smallest; 1.0 means perfectly balanced."""
    if min(dist.counts) == 0:
        raise ValueError("imbalance ratio undefined with an empty class")
    return max(dist.counts) / min(dist.counts)
