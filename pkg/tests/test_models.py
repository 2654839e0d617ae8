"""Tests for the five classifier families, CV, grid search, and persistence."""
import json

import numpy as np
import pytest

from varord.models import (
    CVResult,
    DEFAULT_GRIDS,
    DTParams,
    KNNParams,
    MLPParams,
    ModelFormatError,
    RFParams,
    SVMParams,
    TrainedModel,
    accuracy,
    cross_validate,
    grid_search,
    kfold_indices,
    load_model,
    model_to_json_dict,
    predict,
    random_baseline_accuracy,
    save_model,
    train,
)
from varord.models import mlp as mlp_impl
from varord.models import svm as svm_impl
from varord.models import tree as tree_impl


def blobs(n_per_class, centers, spread, seed, dims=2):
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for label, center in enumerate(centers):
        pts = rng.normal(scale=spread, size=(n_per_class, dims)) + np.asarray(center)
        xs.append(pts)
        ys.append(np.full(n_per_class, label))
    return np.concatenate(xs), np.concatenate(ys)


def six_class_data(n=72, seed=0):
    centers = [(np.cos(k), np.sin(k), k * 0.5) for k in range(6)]
    return blobs(n // 6, centers, spread=0.15, seed=seed, dims=3)


class TestKNN:
    def test_k1_memorizes_duplicate_free_data(self):
        x, y = six_class_data()
        model = train("knn", KNNParams(k=1), x, y, seed=0)
        assert accuracy(model, x, y) == 1.0

    def test_k1_predicts_training_point_label(self):
        x, y = six_class_data()
        model = train("knn", KNNParams(k=1), x, y, seed=0)
        assert predict(model, x[17]) == y[17]

    def test_distance_ties_break_to_lowest_training_index(self):
        x = np.array([[0.0], [2.0]])
        y = np.array([3, 1])
        model = train("knn", KNNParams(k=1), x, y, seed=0, n_classes=6)
        assert predict(model, np.array([1.0])) == 3


class TestDecisionTree:
    def test_unrestricted_tree_fits_consistent_data(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(80, 4))
        y = rng.integers(0, 6, size=80)
        model = train("dt", DTParams(max_depth=None), x, y, seed=0, n_classes=6)
        assert accuracy(model, x, y) == 1.0

    def test_depth_limit_respected(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(60, 3))
        y = rng.integers(0, 2, size=60)
        model = train("dt", DTParams(max_depth=2), x, y, seed=0)

        def depth(node):
            if "label" in node:
                return 0
            return 1 + max(depth(node["left"]), depth(node["right"]))

        assert depth(model.state["tree"]) <= 2

    def test_structure_invariant_under_monotone_transforms(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=(50, 3))
        y = rng.integers(0, 4, size=50)
        transformed = np.column_stack(
            [np.exp(x[:, 0]), x[:, 1] ** 3, 2.0 * x[:, 2] + 1.0]
        )
        m1 = train("dt", DTParams(), x, y, seed=0, n_classes=4)
        m2 = train("dt", DTParams(), transformed, y, seed=0, n_classes=4)
        paths1 = tree_impl.leaf_paths(m1.state["tree"], x)
        paths2 = tree_impl.leaf_paths(m2.state["tree"], transformed)
        assert paths1 == paths2


class TestRandomForest:
    def test_single_tree_forest_matches_tree_votes(self):
        x, y = six_class_data()
        forest_model = train("rf", RFParams(n_trees=1, max_features="all"), x, y, seed=3)
        clone = TrainedModel(
            family="rf",
            params=forest_model.params,
            state={"trees": forest_model.state["trees"] * 5},
            n_classes=forest_model.n_classes,
            seed=3,
        )
        probe = np.random.default_rng(0).normal(size=(40, 3))
        assert np.array_equal(predict(forest_model, probe), predict(clone, probe))

    def test_persisted_tree_count_matches_params(self, tmp_path):
        x, y = six_class_data()
        model = train("rf", RFParams(n_trees=7), x, y, seed=0)
        path = tmp_path / "rf.json"
        save_model(model, path)
        payload = json.loads(path.read_text())
        assert len(payload["state"]["trees"]) == 7


class TestSVM:
    def test_margin_constraints_on_separable_instance(self):
        x, y = blobs(20, [(0, 0), (5, 0)], spread=0.4, seed=2)
        model = train("svm", SVMParams(C=100.0, gamma=0.5, kernel="rbf"), x, y, seed=0)
        values = svm_impl.decision_values(model.state, model.params, x)
        for c in range(2):
            y_pm = np.where(y == c, 1.0, -1.0)
            assert (y_pm * values[:, c]).min() >= 1.0 - svm_impl.DUAL_TOL

    def test_linear_kernel_separates_blobs(self):
        x, y = blobs(25, [(0, 0), (4, 4)], spread=0.3, seed=4)
        model = train("svm", SVMParams(C=10.0, kernel="linear", gamma=1.0), x, y, seed=0)
        assert accuracy(model, x, y) == 1.0

    def test_decision_ties_break_to_lowest_label(self):
        x, y = six_class_data()
        model = train("svm", SVMParams(), x, y, seed=0)
        values = svm_impl.decision_values(model.state, model.params, x[:5])
        preds = predict(model, x[:5])
        for row, p in zip(values, preds):
            assert p == int(np.argmax(row))


class TestMLP:
    def test_separable_blobs_reach_95_percent(self):
        x, y = blobs(100, [(0, 0), (5, 0)], spread=1.0, seed=1)  # 5 sigma apart
        model = train("mlp", MLPParams(hidden_sizes=(16,), epochs=200), x, y, seed=0)
        assert accuracy(model, x, y) >= 0.95

    def test_softmax_sums_to_one_and_argmax_is_prediction(self):
        x, y = six_class_data()
        model = train("mlp", MLPParams(epochs=30), x, y, seed=0)
        probs = mlp_impl.predict_proba(model.state, x)
        assert np.all(np.abs(probs.sum(axis=1) - 1.0) < 1e-9)
        assert np.array_equal(probs.argmax(axis=1), predict(model, x))

    def test_logit_shift_does_not_change_predictions(self):
        x, y = six_class_data()
        model = train("mlp", MLPParams(epochs=30), x, y, seed=0)
        before = predict(model, x)
        shifted_state = {
            "weights": model.state["weights"],
            "biases": [b.copy() for b in model.state["biases"]],
        }
        shifted_state["biases"][-1] = shifted_state["biases"][-1] + 37.5
        shifted = TrainedModel("mlp", model.params, shifted_state, model.n_classes, 0)
        assert np.array_equal(predict(shifted, x), before)

    def test_gradient_check_against_central_differences(self):
        rng = np.random.default_rng(12)
        weights, biases = mlp_impl.init_params([4, 5, 3], rng)
        x = rng.normal(size=(6, 4))
        y = rng.integers(0, 3, size=6)
        y_onehot = np.zeros((6, 3))
        y_onehot[np.arange(6), y] = 1.0
        _, grad_w, grad_b = mlp_impl.loss_and_grads(weights, biases, x, y_onehot)
        eps = 1e-5

        def check(param, grad):
            flat = param.ravel()
            for pos in range(flat.size):
                orig = flat[pos]
                flat[pos] = orig + eps
                up, _, _ = mlp_impl.loss_and_grads(weights, biases, x, y_onehot)
                flat[pos] = orig - eps
                down, _, _ = mlp_impl.loss_and_grads(weights, biases, x, y_onehot)
                flat[pos] = orig
                fd = (up - down) / (2 * eps)
                g = grad.ravel()[pos]
                rel = abs(g - fd) / max(1e-8, abs(g) + abs(fd))
                assert rel < 1e-4

        for w, gw in zip(weights, grad_w):
            check(w, gw)
        for b, gb in zip(biases, grad_b):
            check(b, gb)


class TestAccuracy:
    def test_all_correct_is_one(self):
        x, y = six_class_data()
        model = train("knn", KNNParams(k=1), x, y, seed=0)
        assert accuracy(model, x, y) == 1.0

    def test_random_baseline_near_one_sixth(self):
        rng = np.random.default_rng(123)
        y = rng.integers(0, 6, size=10_000)
        acc = random_baseline_accuracy(y, n_classes=6, seed=77)
        assert abs(acc - 0.1667) < 0.02

    def test_accuracy_plus_error_rate_is_one(self):
        x, y = six_class_data()
        model = train("dt", DTParams(max_depth=2), x, y, seed=0)
        acc = accuracy(model, x, y)
        err = float((predict(model, x) != y).mean())
        assert acc + err == 1.0


class TestCrossValidation:
    def test_fold_sizes_ten_by_five(self):
        folds = kfold_indices(10, 5, seed=0)
        assert [len(f) for f in folds] == [2, 2, 2, 2, 2]

    def test_fold_sizes_eleven_by_five(self):
        folds = kfold_indices(11, 5, seed=0)
        assert sorted(len(f) for f in folds) == [2, 2, 2, 2, 3]
        assert [len(f) for f in folds] == [3, 2, 2, 2, 2]

    def test_folds_partition_data(self):
        folds = kfold_indices(23, 5, seed=9)
        joined = sorted(int(i) for f in folds for i in f)
        assert joined == list(range(23))

    def test_knn_on_clustered_duplicates_scores_one(self):
        base, labels = blobs(5, [(0, 0), (10, 0), (0, 10)], spread=0.05, seed=6)
        x = np.concatenate([base, base])
        y = np.concatenate([labels, labels])
        result = cross_validate("knn", KNNParams(k=1), x, y, k=5, seed=1)
        assert result.mean == 1.0

    def test_invalid_fold_counts(self):
        with pytest.raises(ValueError):
            kfold_indices(10, 1, seed=0)
        with pytest.raises(ValueError):
            kfold_indices(3, 5, seed=0)


class TestGridSearch:
    def test_singleton_grid_returns_its_entry(self):
        x, y = six_class_data()
        best, table = grid_search("knn", [KNNParams(k=3)], x, y, seed=0)
        assert best == KNNParams(k=3)
        assert len(table) == 1

    def test_dominating_depth_wins_on_xor(self):
        corners = [(0, 0), (1, 1), (0, 1), (1, 0)]
        labels = [0, 0, 1, 1]
        rng = np.random.default_rng(3)
        xs, ys = [], []
        for corner, label in zip(corners, labels):
            xs.append(rng.normal(scale=0.03, size=(10, 2)) + corner)
            ys.append(np.full(10, label))
        x = np.concatenate(xs)
        y = np.concatenate(ys)
        grid = [DTParams(max_depth=1), DTParams(max_depth=None)]
        best, table = grid_search("dt", grid, x, y, seed=2)
        assert best == DTParams(max_depth=None)
        assert table[1].cv.mean > table[0].cv.mean

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            grid_search("knn", [], np.zeros((4, 2)), np.zeros(4, dtype=int), seed=0)

    def test_same_seed_reproduces_table(self):
        x, y = six_class_data()
        grid = [KNNParams(k=1), KNNParams(k=3)]
        first = grid_search("knn", grid, x, y, seed=5)
        second = grid_search("knn", grid, x, y, seed=5)
        assert first == second


ALL_FAMILY_PARAMS = [
    ("knn", KNNParams(k=3)),
    ("dt", DTParams(max_depth=6)),
    ("rf", RFParams(n_trees=5)),
    ("svm", SVMParams(C=1.0)),
    ("mlp", MLPParams(hidden_sizes=(8,), epochs=40)),
]


class TestPersistence:
    @pytest.mark.parametrize("family,params", ALL_FAMILY_PARAMS)
    def test_roundtrip_predictions_identical(self, family, params, tmp_path):
        x, y = six_class_data()
        model = train(family, params, x, y, seed=11)
        path = tmp_path / f"{family}.json"
        save_model(model, path)
        loaded = load_model(path)
        probe = np.random.default_rng(1).normal(size=(1000, 3))
        assert np.array_equal(predict(model, probe), predict(loaded, probe))

    def test_wrong_schema_version_rejected(self, tmp_path):
        x, y = six_class_data()
        model = train("knn", KNNParams(k=1), x, y, seed=0)
        payload = model_to_json_dict(model)
        payload["schema_version"] = 999
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ModelFormatError, match="schema_version"):
            load_model(path)

    def test_corrupt_file_rejected(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{not json")
        with pytest.raises(ModelFormatError, match="corrupt"):
            load_model(path)

    @pytest.mark.parametrize("family,params", ALL_FAMILY_PARAMS)
    def test_training_is_bit_deterministic(self, family, params):
        x, y = six_class_data()
        a = json.dumps(model_to_json_dict(train(family, params, x, y, seed=21)))
        b = json.dumps(model_to_json_dict(train(family, params, x, y, seed=21)))
        assert a == b


class TestValidation:
    def test_empty_training_set(self):
        with pytest.raises(ValueError, match="empty"):
            train("knn", KNNParams(), np.zeros((0, 3)), np.zeros(0, dtype=int), seed=0)

    def test_degenerate_hyperparameters(self):
        with pytest.raises(ValueError):
            KNNParams(k=0)
        with pytest.raises(ValueError):
            SVMParams(C=-1.0)
        with pytest.raises(ValueError):
            MLPParams(hidden_sizes=())
        with pytest.raises(ValueError):
            RFParams(max_features="half")

    def test_family_params_mismatch(self):
        with pytest.raises(ValueError, match="family"):
            train("knn", DTParams(), np.zeros((4, 2)), np.zeros(4, dtype=int), seed=0)

    def test_default_grids_cover_all_families(self):
        assert set(DEFAULT_GRIDS) == {"knn", "dt", "rf", "svm", "mlp"}
        assert len(DEFAULT_GRIDS["svm"]) == 32
        assert len(DEFAULT_GRIDS["dt"]) == 15
