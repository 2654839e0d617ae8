"""Tests for orbit expansion, augmentation balance, and distribution diagnostics."""
import math

import pytest

from test_features import permute_feature_vector
from varord.augment import ClassDistribution, augment_dataset, class_distribution, imbalance_ratio, orbit
from varord.dataset import Dataset, GeneratorConfig, ProblemRecord, generate_synthetic, label_from_timings
from varord.features import extract_features
from varord.polysys import all_permutations


def roots(n: int, seed: int = 3) -> Dataset:
    return generate_synthetic(GeneratorConfig(n_records=n), seed=seed)


class TestOrbit:
    def test_identity_member_equals_root(self):
        root = roots(1).records[0]
        members = orbit(root)
        assert members[0] == root

    def test_orbit_labels_cover_all_classes_when_tie_free(self):
        for root in roots(12).records:
            if root.tie:
                continue
            labels = sorted(m.label for m in orbit(root))
            assert labels == [0, 1, 2, 3, 4, 5]

    def test_members_relabel_consistently_with_timings(self):
        for root in roots(10).records:
            for m in orbit(root):
                assert m.timings[m.label] == min(m.timings)
                if not root.tie:
                    assert label_from_timings(m.timings)[0] == m.label

    def test_member_timings_are_a_permutation_of_root_timings(self):
        for root in roots(10).records:
            base = sorted(root.timings)
            for m in orbit(root):
                assert sorted(m.timings) == base

    def test_member_features_match_equivariant_image(self):
        for root in roots(8).records:
            feats = extract_features(root.system)
            for m, sigma in zip(orbit(root), all_permutations(3)):
                assert m.features == permute_feature_vector(feats, sigma)
                assert m.features == extract_features(m.system)

    def test_orbit_ids_and_perms(self):
        root = roots(1).records[0]
        members = orbit(root)
        assert all(m.orbit_id == root.id for m in members)
        assert members[0].id == root.id
        assert [m.id for m in members[1:]] == [f"{root.id}#{k}" for k in range(1, 6)]
        assert [m.perm for m in members] == list(all_permutations(3))

    def test_non_root_rejected(self):
        root = roots(1).records[0]
        member = orbit(root)[2]
        with pytest.raises(ValueError, match="not an orbit root"):
            orbit(member)


class TestAugmentDataset:
    def test_ten_roots_give_sixty_records(self):
        d = augment_dataset(roots(10))
        assert len(d) == 60

    def test_class_counts_equal_input_size_when_tie_free(self):
        base = roots(40, seed=12)
        tie_free = Dataset(tuple(r for r in base.records if not r.tie))
        augmented = augment_dataset(tie_free)
        dist = class_distribution(augmented)
        assert dist.counts == (len(tie_free),) * 6
        assert dist.total == 6 * len(tie_free)

    def test_augmenting_non_roots_rejected(self):
        augmented = augment_dataset(roots(2))
        with pytest.raises(ValueError, match="orbit root"):
            augment_dataset(augmented)

    def test_total_is_six_times_input(self):
        base = roots(25, seed=4)
        assert class_distribution(augment_dataset(base)).total == 6 * len(base)

    def test_distribution_idempotent_after_rerooting(self):
        # re-rooting an orbit-closed balanced dataset and augmenting again
        # scales every class count by the group order
        base = Dataset(tuple(r for r in roots(20, seed=5).records if not r.tie))
        once = augment_dataset(base)
        rerooted = Dataset(
            tuple(
                ProblemRecord(
                    id=f"re{i:05d}",
                    orbit_id=f"re{i:05d}",
                    perm=base.records[0].perm.identity(3),
                    system=m.system,
                    features=m.features,
                    timings=m.timings,
                    label=m.label,
                    tie=m.tie,
                )
                for i, m in enumerate(once.records)
            )
        )
        twice = augment_dataset(rerooted)
        before = class_distribution(once).counts
        after = class_distribution(twice).counts
        assert after == tuple(6 * c for c in before)


class TestDistribution:
    def test_reference_skew_counts(self):
        labels = []
        for c, count in enumerate((580, 900, 1100, 800, 858, 2657)):
            labels.extend([c] * count)
        records = []
        from test_dataset import make_record

        for i, lab in enumerate(labels):
            records.append(make_record(i, label=lab))
        dist = class_distribution(Dataset(tuple(records)))
        assert dist.counts[0] == 580
        assert dist.counts[5] == 2657
        assert abs(imbalance_ratio(dist) - 4.58) < 0.01

    def test_empty_dataset_all_zero(self):
        dist = class_distribution(Dataset(()))
        assert dist.counts == (0,) * 6
        assert dist.total == 0

    def test_balanced_ratio_is_one(self):
        assert imbalance_ratio(ClassDistribution((7,) * 6, 42)) == 1.0

    def test_small_ratio_example(self):
        assert imbalance_ratio(ClassDistribution((1, 1, 1, 1, 1, 2), 7)) == 2.0

    def test_zero_class_rejected(self):
        with pytest.raises(ValueError):
            imbalance_ratio(ClassDistribution((0, 1, 1, 1, 1, 1), 5))
