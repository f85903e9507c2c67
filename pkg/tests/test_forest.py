import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapelet_anomaly.core import ClassLabel, TransformMatrix
from shapelet_anomaly.errors import (
    EmptyMatrix,
    FeatureLengthMismatch,
    InvalidArgs,
    ParseError,
    SingleClassTrainingSet,
)
from shapelet_anomaly.forest import DecisionTree, ForestConfig, ForestModel, predict, train_forest


def separable():
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 1, 20)
    b = rng.uniform(2, 3, 20)
    return TransformMatrix(np.concatenate([a, b])[:, None], (1,) * 20 + (2,) * 20)


def random_matrix(seed, n=60, r=6, k=3):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % k + 1
    X = rng.random((n, r)) + 0.3 * y[:, None] * (rng.random(r) > 0.5)
    return TransformMatrix(X, tuple(int(v) for v in y))


def test_separable_training_accuracy():
    m = separable()
    model = train_forest(m, ForestConfig(n_trees=25, rng_seed=1))
    assert model.predict_labels(m.values) == list(m.labels)
    assert predict(model, [0.5])[0] == ClassLabel.NORMAL
    assert predict(model, [2.5])[0] == ClassLabel.MISSING


def test_deterministic_and_worker_independent():
    m = random_matrix(1)
    a = train_forest(m, ForestConfig(n_trees=20, rng_seed=7))
    b = train_forest(m, ForestConfig(n_trees=20, rng_seed=7), workers=4)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    c = train_forest(m, ForestConfig(n_trees=20, rng_seed=8))
    assert json.dumps(a.to_dict()) != json.dumps(c.to_dict())


@given(st.integers(0, 1000))
@settings(max_examples=20, deadline=None)
def test_probabilities_sum_to_one_and_leaves_valid(seed):
    m = random_matrix(seed)
    model = train_forest(m, ForestConfig(n_trees=8, rng_seed=seed))
    P = model.predict_proba(np.random.default_rng(seed).random((30, m.cols)) * 2)
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-9)
    for tree in model.trees:
        leaves = tree.feature < 0
        assert np.allclose(tree.value[leaves].sum(axis=1), 1.0, atol=1e-9)
        assert np.all(tree.feature[~leaves] < m.cols)


def test_mean_of_leaf_vectors_matches_manual_aggregation():
    m = random_matrix(3)
    model = train_forest(m, ForestConfig(n_trees=9, rng_seed=3))
    X = np.random.default_rng(4).random((15, m.cols))
    manual = np.zeros((15, len(model.classes)))
    for tree in model.trees:
        for i, x in enumerate(X):
            k = 0
            while tree.feature[k] >= 0:
                k = tree.left[k] if x[tree.feature[k]] <= tree.threshold[k] else tree.right[k]
            manual[i] += tree.value[k]
    manual /= len(model.trees)
    assert np.allclose(model.predict_proba(X), manual, rtol=0, atol=1e-15)
    # tree order does not matter
    shuffled = ForestModel(model.trees[::-1], model.classes, model.config, model.n_features)
    assert np.allclose(shuffled.predict_proba(X), model.predict_proba(X), rtol=0, atol=1e-15)


def leaf_tree(probs):
    return DecisionTree(
        np.array([-1]), np.array([0.0]), np.array([-1]), np.array([-1]), np.array([probs], dtype=float)
    )


def test_single_pure_tree():
    classes = tuple(ClassLabel(c) for c in (1, 3))
    model = ForestModel([leaf_tree([0.0, 1.0])], classes, ForestConfig(n_trees=1), 2)
    label, p = predict(model, [0.1, 0.2])
    assert label == ClassLabel.MINOR and p.tolist() == [0.0, 1.0]


def test_tie_goes_to_lowest_id():
    classes = tuple(ClassLabel(c) for c in (2, 5))
    model = ForestModel([leaf_tree([1, 0]), leaf_tree([0, 1])], classes, ForestConfig(n_trees=2), 1)
    label, p = predict(model, [0.0])
    assert label == ClassLabel.MISSING and p.tolist() == [0.5, 0.5]


def test_single_tree_fits_its_bootstrap():
    m = random_matrix(5, n=40)
    model = train_forest(m, ForestConfig(n_trees=1, rng_seed=2))
    boot = np.random.default_rng([2, 0]).integers(0, 40, size=40)
    X = m.values[boot]
    y = [m.labels[i] for i in boot]
    assert model.predict_labels(X) == y


def test_errors():
    with pytest.raises(SingleClassTrainingSet):
        train_forest(TransformMatrix(np.ones((3, 2)), (1, 1, 1)))
    with pytest.raises(EmptyMatrix):
        train_forest(TransformMatrix(np.ones((3, 0)), (1, 2, 1)))
    model = train_forest(separable(), ForestConfig(n_trees=2))
    with pytest.raises(FeatureLengthMismatch):
        predict(model, [1.0, 2.0])
    with pytest.raises(InvalidArgs):
        ForestConfig(n_trees=0)
    with pytest.raises(InvalidArgs):
        train_forest(separable(), ForestConfig(max_features_per_split=3))


def test_default_feature_count():
    assert ForestConfig().features_for(70) == 8
    assert ForestConfig().features_for(1) == 1


def test_serialisation_round_trip():
    m = random_matrix(6)
    model = train_forest(m, ForestConfig(n_trees=5, rng_seed=1, max_depth=4))
    doc = json.loads(json.dumps(model.to_dict()))
    back = ForestModel.from_dict(doc)
    assert np.array_equal(back.predict_proba(m.values), model.predict_proba(m.values))
    assert json.dumps(back.to_dict()) == json.dumps(model.to_dict())
    with pytest.raises(ParseError):
        ForestModel.from_dict({**doc, "schema_version": 99})
    with pytest.raises(ParseError):
        ForestModel.from_dict({k: v for k, v in doc.items() if k != "trees"})


def test_depth_and_leaf_limits():
    m = random_matrix(7, n=80)
    model = train_forest(m, ForestConfig(n_trees=3, max_depth=0))
    assert all(t.n_nodes == 1 for t in model.trees)
    model = train_forest(m, ForestConfig(n_trees=3, min_samples_leaf=10))
    for t in model.trees:
        boot_rows = t.apply(m.values)
        assert t.n_nodes >= 1 and boot_rows.shape == (80,)
