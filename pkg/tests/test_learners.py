import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feedfilter.learners import (
    KINDS,
    LearnerParams,
    TrainingSet,
    accuracy,
    deserialize_model,
    fit,
    serialize_model,
)
from feedfilter.textfeat import SparseVector, build_vocabulary, tokenize, vectorize


def counts_vector(mapping):
    return SparseVector.from_mapping({k: float(v) for k, v in mapping.items()})


@pytest.fixture()
def nb_fixture():
    """Four tiny documents with hand-checkable Bayes arithmetic."""
    docs = ["you idiot", "nice day", "idiot troll", "good nice"]
    labels = (True, False, True, False)
    tokenized = [tokenize(d) for d in docs]
    vocab = build_vocabulary(tokenized)
    vectors = tuple(vectorize(t, vocab, "counts") for t in tokenized)
    training = TrainingSet(vectors=vectors, labels=labels, n_features=len(vocab))
    return training, vocab


@pytest.fixture()
def separable_fixture():
    """Ten 2-feature points split by the x0 - x1 axis."""
    true_points = [(3, 0), (4, 1), (5, 0), (3, 1), (4, 0)]
    false_points = [(0, 3), (0, 4), (1, 5), (1, 3), (0, 4)]
    vectors = tuple(
        counts_vector({0: a, 1: b}) for a, b in true_points + false_points
    )
    labels = (True,) * 5 + (False,) * 5
    return TrainingSet(vectors=vectors, labels=labels, n_features=2)


@pytest.fixture()
def threshold_fixture():
    """One feature; value 0 means False, value 1 means True."""
    vectors = tuple(
        counts_vector({0: 1.0}) if i >= 10 else SparseVector(indices=(), values=())
        for i in range(20)
    )
    labels = (False,) * 10 + (True,) * 10
    return TrainingSet(vectors=vectors, labels=labels, n_features=1)


class TestTrainingSet:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            TrainingSet(vectors=(), labels=(), n_features=3)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            TrainingSet(vectors=(counts_vector({0: 1}),), labels=(), n_features=1)

    def test_index_beyond_features(self):
        with pytest.raises(ValueError):
            TrainingSet(vectors=(counts_vector({5: 1}),), labels=(True,), n_features=2)


class TestNaiveBayes:
    def test_hand_computed_log_posteriors(self, nb_fixture):
        training, vocab = nb_fixture
        model = fit("nb", training, seed=1)
        probe = vectorize(["idiot"], vocab, "counts")
        scores = model.log_joint(probe)
        # Priors 2/4 each; "idiot" appears twice in the 4 filter-class
        # tokens, never in the keep-class tokens; V=6, alpha=1.
        assert scores[True] == pytest.approx(math.log(0.5) + math.log(3 / 10), abs=1e-12)
        assert scores[False] == pytest.approx(math.log(0.5) + math.log(1 / 10), abs=1e-12)
        assert model.predict(probe) is True

    def test_empty_vector_ties_to_false(self, nb_fixture):
        training, vocab = nb_fixture
        model = fit("nb", training, seed=1)
        # Equal priors and no evidence: log posteriors tie, rule says False.
        empty = vectorize([], vocab, "counts")
        scores = model.log_joint(empty)
        assert scores[True] == scores[False]
        assert model.predict(empty) is False

    def test_unseen_terms_stay_finite(self, nb_fixture):
        training, _ = nb_fixture
        model = fit("nb", training, seed=1)
        for row in model.log_likelihood:
            assert all(math.isfinite(v) for v in row)

    def test_all_true_labels_constant_true(self, nb_fixture):
        training, vocab = nb_fixture
        constant = fit("nb", TrainingSet(training.vectors, (True,) * 4, training.n_features), seed=0)
        assert constant.predict(vectorize(["nice"], vocab, "counts")) is True
        assert constant.predict(SparseVector(indices=(), values=())) is True


class TestLinearSvm:
    def test_separable_fixture_reaches_full_accuracy(self, separable_fixture):
        model = fit("svm", separable_fixture, seed=7, params=LearnerParams(svm_epochs=200))
        assert accuracy(model, separable_fixture) == 1.0

    def test_objective_trace_finite(self, separable_fixture):
        model = fit("svm", separable_fixture, seed=7, params=LearnerParams(svm_epochs=50))
        assert model.objective_trace
        assert all(math.isfinite(v) for v in model.objective_trace)

    def test_zero_decision_is_false(self):
        training = TrainingSet(
            vectors=(counts_vector({0: 1}), counts_vector({1: 1})),
            labels=(True, False),
            n_features=2,
        )
        model = fit("svm", training, seed=0)
        probe = SparseVector(indices=(), values=())  # decision == bias
        assert model.predict(probe) == (model.decision(probe) > 0.0)

    def test_single_class_constant(self, separable_fixture):
        training = TrainingSet(
            separable_fixture.vectors, (False,) * 10, separable_fixture.n_features
        )
        model = fit("svm", training, seed=3)
        assert all(not model.predict(v) for v in separable_fixture.vectors)


class TestRandomForest:
    def test_single_tree_threshold_split(self, threshold_fixture):
        model = fit("rf", threshold_fixture, seed=3, params=LearnerParams(rf_trees=1))
        assert accuracy(model, threshold_fixture) == 1.0

    def test_all_false_training(self, threshold_fixture):
        training = TrainingSet(threshold_fixture.vectors, (False,) * 20, 1)
        model = fit("rf", training, seed=5, params=LearnerParams(rf_trees=9))
        assert model.predict(counts_vector({0: 1.0})) is False

    def test_forest_beats_coin_on_threshold_data(self, threshold_fixture):
        model = fit("rf", threshold_fixture, seed=11, params=LearnerParams(rf_trees=25))
        assert accuracy(model, threshold_fixture) == 1.0


class TestContract:
    def test_unknown_kind(self, threshold_fixture):
        with pytest.raises(ValueError):
            fit("knn", threshold_fixture, seed=0)

    def test_constant_false_on_3t_7f_scores_point_seven(self, threshold_fixture):
        constant_false = fit(
            "nb", TrainingSet(threshold_fixture.vectors, (False,) * 20, 1), seed=0
        )
        test = TrainingSet(
            threshold_fixture.vectors[:10], (True,) * 3 + (False,) * 7, 1
        )
        assert accuracy(constant_false, test) == pytest.approx(0.7)

    def test_constant_true_on_all_false_scores_zero(self, threshold_fixture):
        constant_true = fit(
            "nb", TrainingSet(threshold_fixture.vectors, (True,) * 20, 1), seed=0
        )
        test = TrainingSet(threshold_fixture.vectors[:5], (False,) * 5, 1)
        assert accuracy(constant_true, test) == 0.0

    def test_perfect_model_scores_one(self, threshold_fixture):
        model = fit("rf", threshold_fixture, seed=3, params=LearnerParams(rf_trees=5))
        assert accuracy(model, threshold_fixture) == 1.0


class TestDeterminismAndSerialization:
    @pytest.mark.parametrize("kind", KINDS)
    def test_same_seed_bit_identical_serialization(self, kind, separable_fixture):
        params = LearnerParams(svm_epochs=30, rf_trees=10)
        first = serialize_model(fit(kind, separable_fixture, seed=42, params=params))
        second = serialize_model(fit(kind, separable_fixture, seed=42, params=params))
        assert first == second

    @pytest.mark.parametrize("kind", KINDS)
    def test_round_trip_predicts_identically(self, kind, separable_fixture):
        params = LearnerParams(svm_epochs=30, rf_trees=10)
        model = fit(kind, separable_fixture, seed=9, params=params)
        restored = deserialize_model(serialize_model(model))
        probes = list(separable_fixture.vectors) + [
            SparseVector(indices=(), values=()),
            counts_vector({0: 2, 1: 2}),
        ]
        for probe in probes:
            assert restored.predict(probe) == model.predict(probe)

    @pytest.mark.parametrize("kind", KINDS)
    def test_round_trip_serializes_identically(self, kind, separable_fixture):
        params = LearnerParams(svm_epochs=30, rf_trees=10)
        payload = serialize_model(fit(kind, separable_fixture, seed=9, params=params))
        assert serialize_model(deserialize_model(payload)) == payload

    @given(st.integers(min_value=0, max_value=2**63 - 1))
    @settings(max_examples=20)
    def test_seeds_accepted_across_range(self, seed):
        training = TrainingSet(
            vectors=(counts_vector({0: 1}), counts_vector({1: 1})),
            labels=(True, False),
            n_features=2,
        )
        model = fit("rf", training, seed=seed, params=LearnerParams(rf_trees=3))
        assert model.training_seed == seed
