"""Filtering regimes and their evaluation.

Three regimes are compared per user: a single general filter trained on
population-majority labels, a per-user agent filter trained only on that
user's responses (scored by stratified 10-fold cross-validation), and a
non-learning majority baseline that always emits the user's modal choice.
The comparison report carries win/lose/tie tables and paired Wilcoxon
tests for every regime pair.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import NON_CODABLE, Message, SurveySet, UserResponse
from .learners import (
    ClassifierModel,
    LearnerParams,
    TrainingSet,
    deserialize_model,
    fit,
    serialize_model,
)
from .stats import WilcoxonResult, spearman, wilcoxon_signed_rank
from .textfeat import FeatureConfig, SparseVector, Vocabulary, build_vocabulary, tokenize, vectorize
from .util import derive_seed

# Conventional per-learner feature representations, used when mode is "auto".
DEFAULT_MODES = {"nb": "counts", "svm": "tfidf", "rf": "counts"}

REGIME_MAJORITY = "majority"
REGIME_GENERAL = "general"


def feature_mode(kind: str, features: FeatureConfig) -> str:
    if features.mode != "auto":
        return features.mode
    return DEFAULT_MODES[kind]


def _tokens(message: Message, features: FeatureConfig) -> list[str]:
    return tokenize(message.text, stopwords=features.stopwords, stem=features.stem)


@dataclass(frozen=True)
class GeneralFilter:
    """One population-level classifier shared by all users."""

    kind: str
    classifier: ClassifierModel
    vocabulary: Vocabulary
    mode: str
    features: FeatureConfig
    n_training_messages: int

    def predict_message(self, message: Message) -> bool:
        vec = vectorize(_tokens(message, self.features), self.vocabulary, self.mode)
        return self.classifier.predict(vec)


def train_general(
    survey: SurveySet,
    kind: str,
    seed: int,
    params: LearnerParams = LearnerParams(),
    features: FeatureConfig = FeatureConfig(),
) -> GeneralFilter:
    """Fit a classifier on majority filter votes over fully-rated messages.

    Only messages with exactly raters_per_message responses and a codable
    category are used; with an odd rater count the majority label is never
    tied.
    """
    k = survey.raters_per_message
    docs: list[list[str]] = []
    labels: list[bool] = []
    for message in survey.messages:
        rs = survey.responses_by_message.get(message.id, ())
        if len(rs) != k or message.resolved_category is NON_CODABLE:
            continue
        yes = sum(1 for r in rs if r.filter)
        docs.append(_tokens(message, features))
        labels.append(yes * 2 > k)
    if not docs:
        raise ValueError("no messages with a full rater complement to train on")
    vocab = build_vocabulary(docs, min_df=features.min_df)
    mode = feature_mode(kind, features)
    vectors = tuple(vectorize(doc, vocab, mode) for doc in docs)
    training = TrainingSet(vectors=vectors, labels=tuple(labels), n_features=len(vocab))
    model = fit(kind, training, seed, params)
    return GeneralFilter(
        kind=kind,
        classifier=model,
        vocabulary=vocab,
        mode=mode,
        features=features,
        n_training_messages=len(docs),
    )


def evaluate_general_per_user(
    general: GeneralFilter, survey: SurveySet
) -> dict[str, float]:
    """Fraction of each user's responses the general filter matches."""
    predictions = {
        m.id: general.predict_message(m)
        for m in survey.messages
        if m.id in survey.responses_by_message
    }
    accuracies: dict[str, float] = {}
    for user_id, rs in survey.responses_by_user.items():
        correct = sum(1 for r in rs if predictions[r.message_id] == r.filter)
        accuracies[user_id] = correct / len(rs)
    return accuracies


def _deal_folds(
    responses: Sequence[UserResponse], k: int, rng: random.Random
) -> list[list[UserResponse]]:
    """Stratified round-robin folds, falling back to plain folds when a
    class has fewer than k members."""
    pos = [r for r in responses if r.filter]
    neg = [r for r in responses if not r.filter]
    folds: list[list[UserResponse]] = [[] for _ in range(k)]
    if pos and neg and len(pos) >= k and len(neg) >= k:
        strata = [pos, neg]
    else:
        strata = [list(responses)]
    for stratum in strata:
        shuffled = stratum[:]
        rng.shuffle(shuffled)
        for i, r in enumerate(shuffled):
            folds[i % k].append(r)
    return folds


def cross_validate_user(
    survey: SurveySet,
    user_id: str,
    kind: str,
    k: int = 10,
    seed: int = 0,
    params: LearnerParams = LearnerParams(),
    features: FeatureConfig = FeatureConfig(),
) -> float:
    """Mean k-fold cross-validated accuracy of a user-adapted filter.

    Fold assignment is deterministic from (seed, user); each fold's
    vocabulary is built from its training split only.
    """
    responses = survey.responses_by_user.get(user_id, ())
    if len(responses) < 2:
        raise ValueError(f"user {user_id!r} has fewer than 2 responses")
    ordered = sorted(responses, key=lambda r: r.message_id)
    rng = random.Random(f"cv:{seed}:{user_id}")
    folds = _deal_folds(ordered, k, rng)
    token_cache = {
        r.message_id: _tokens(survey.message_by_id[r.message_id], features)
        for r in ordered
    }
    mode = feature_mode(kind, features)
    fold_accuracies: list[float] = []
    for i, fold in enumerate(folds):
        if not fold:
            continue
        train_rs = [r for j, f in enumerate(folds) if j != i for r in f]
        vocab = build_vocabulary(
            (token_cache[r.message_id] for r in train_rs), min_df=features.min_df
        )
        training = TrainingSet(
            vectors=tuple(
                vectorize(token_cache[r.message_id], vocab, mode) for r in train_rs
            ),
            labels=tuple(r.filter for r in train_rs),
            n_features=len(vocab),
        )
        model = fit(kind, training, derive_seed(seed, user_id, "fold", i), params)
        correct = sum(
            1
            for r in fold
            if model.predict(vectorize(token_cache[r.message_id], vocab, mode))
            == r.filter
        )
        fold_accuracies.append(correct / len(fold))
    return sum(fold_accuracies) / len(fold_accuracies)


def general_to_json(general: GeneralFilter) -> str:
    """Self-contained JSON for a trained general filter."""
    terms = [""] * len(general.vocabulary.index)
    for term, idx in general.vocabulary.index.items():
        terms[idx] = term
    doc = {
        "format": 1,
        "kind": general.kind,
        "mode": general.mode,
        "model": json.loads(serialize_model(general.classifier)),
        "vocabulary": {
            "terms": terms,
            "doc_freq": list(general.vocabulary.doc_freq),
            "total_documents": general.vocabulary.total_documents,
        },
        "features": general.features.to_dict(),
        "n_training_messages": general.n_training_messages,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def general_from_json(payload: str) -> GeneralFilter:
    doc = json.loads(payload)
    if doc.get("format") != 1:
        raise ValueError(f"unsupported filter format: {doc.get('format')!r}")
    vocab_doc = doc["vocabulary"]
    vocab = Vocabulary(
        index={term: i for i, term in enumerate(vocab_doc["terms"])},
        doc_freq=tuple(vocab_doc["doc_freq"]),
        total_documents=vocab_doc["total_documents"],
    )
    feats = doc["features"]
    features = FeatureConfig(
        mode=feats["features.mode"],
        min_df=feats["features.min_df"],
        stopwords=feats["features.stopwords"],
        stem=feats["features.stem"],
    )
    return GeneralFilter(
        kind=doc["kind"],
        classifier=deserialize_model(json.dumps(doc["model"])),
        vocabulary=vocab,
        mode=doc["mode"],
        features=features,
        n_training_messages=doc["n_training_messages"],
    )


@dataclass(frozen=True)
class UserAgent:
    """Per-user filter retrained from that user's full response history."""

    user_id: str
    kind: str
    classifier: ClassifierModel
    vocabulary: Vocabulary
    mode: str
    features: FeatureConfig
    history: tuple[UserResponse, ...]

    def predict_message(self, message: Message) -> bool:
        vec = vectorize(_tokens(message, self.features), self.vocabulary, self.mode)
        return self.classifier.predict(vec)


def train_user_agent(
    user_id: str,
    history: Sequence[UserResponse],
    message_by_id: Mapping[str, Message],
    kind: str,
    seed: int,
    params: LearnerParams = LearnerParams(),
    features: FeatureConfig = FeatureConfig(),
) -> UserAgent:
    """Fit a user-adapted filter on the user's own responses only.

    Retraining with the same history and seed reproduces the same agent.
    """
    if not history:
        raise ValueError("cannot train an agent on an empty history")
    docs = [_tokens(message_by_id[r.message_id], features) for r in history]
    vocab = build_vocabulary(docs, min_df=features.min_df)
    mode = feature_mode(kind, features)
    training = TrainingSet(
        vectors=tuple(vectorize(doc, vocab, mode) for doc in docs),
        labels=tuple(r.filter for r in history),
        n_features=len(vocab),
    )
    model = fit(kind, training, derive_seed(seed, "agent", user_id), params)
    return UserAgent(
        user_id=user_id,
        kind=kind,
        classifier=model,
        vocabulary=vocab,
        mode=mode,
        features=features,
        history=tuple(history),
    )


@dataclass(frozen=True)
class MajorityBaseline:
    predicted: bool
    accuracy: float


def majority_baseline(responses: Sequence[UserResponse]) -> MajorityBaseline:
    """The user's modal filter choice; ties predict False."""
    if not responses:
        raise ValueError("need at least one response")
    yes = sum(1 for r in responses if r.filter)
    n = len(responses)
    predicted = yes * 2 > n
    modal = yes if predicted else n - yes
    return MajorityBaseline(predicted=predicted, accuracy=modal / n)


# ---------------------------------------------------------------------------
# Cross-regime comparison


@dataclass(frozen=True)
class UserEval:
    user_id: str
    n_responses: int
    n_filtered: int
    accuracy_general: float
    accuracy_user_adapted: Mapping[str, float]
    accuracy_majority: float
    majority_prediction: bool


@dataclass(frozen=True)
class PairComparison:
    regime_a: str
    regime_b: str
    win: int  # users where regime_a is strictly more accurate
    lose: int
    tie: int
    wilcoxon: WilcoxonResult


def compare_accuracies(
    regime_a: str,
    regime_b: str,
    acc_a: Sequence[float],
    acc_b: Sequence[float],
) -> PairComparison:
    """Win/lose/tie counts (a's perspective, strict inequality on the raw
    doubles) plus a paired Wilcoxon test."""
    win = sum(1 for x, y in zip(acc_a, acc_b) if x > y)
    lose = sum(1 for x, y in zip(acc_a, acc_b) if x < y)
    return PairComparison(
        regime_a=regime_a,
        regime_b=regime_b,
        win=win,
        lose=lose,
        tie=len(acc_a) - win - lose,
        wilcoxon=wilcoxon_signed_rank(acc_a, acc_b),
    )


@dataclass(frozen=True)
class EvalReport:
    users: tuple[UserEval, ...]  # ordered by n_filtered ascending
    excluded_users: tuple[dict, ...]
    comparisons: tuple[PairComparison, ...]
    config: dict

    def regimes(self) -> list[str]:
        order = [REGIME_MAJORITY, REGIME_GENERAL]
        order.extend(self.config["kinds"])
        return order

    def accuracies(self, regime: str) -> list[float]:
        if regime == REGIME_MAJORITY:
            return [u.accuracy_majority for u in self.users]
        if regime == REGIME_GENERAL:
            return [u.accuracy_general for u in self.users]
        return [u.accuracy_user_adapted[regime] for u in self.users]

    def mean_accuracy(self, regime: str) -> float:
        values = self.accuracies(regime)
        return sum(values) / len(values)

    def comparison(self, regime_a: str, regime_b: str) -> PairComparison:
        for c in self.comparisons:
            if (c.regime_a, c.regime_b) == (regime_a, regime_b):
                return c
        raise KeyError(f"no comparison for pair ({regime_a!r}, {regime_b!r})")

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "users": [
                {
                    "user_id": u.user_id,
                    "n_responses": u.n_responses,
                    "n_filtered": u.n_filtered,
                    "accuracy_general": u.accuracy_general,
                    "accuracy_user_adapted": dict(sorted(u.accuracy_user_adapted.items())),
                    "accuracy_majority": u.accuracy_majority,
                    "majority_prediction": u.majority_prediction,
                }
                for u in self.users
            ],
            "excluded_users": list(self.excluded_users),
            "comparisons": [
                {
                    "regime_a": c.regime_a,
                    "regime_b": c.regime_b,
                    "win": c.win,
                    "lose": c.lose,
                    "tie": c.tie,
                    "wilcoxon": c.wilcoxon.to_json_dict(),
                }
                for c in self.comparisons
            ],
        }

    def to_csv_lines(self) -> list[str]:
        lines = ["user_id,n_filtered,acc_general,acc_nb,acc_svm,acc_rf,acc_majority"]
        for u in self.users:
            adapted = {
                kind: format(acc, ".17g")
                for kind, acc in u.accuracy_user_adapted.items()
            }
            lines.append(
                ",".join(
                    [
                        u.user_id,
                        str(u.n_filtered),
                        format(u.accuracy_general, ".17g"),
                        adapted.get("nb", ""),
                        adapted.get("svm", ""),
                        adapted.get("rf", ""),
                        format(u.accuracy_majority, ".17g"),
                    ]
                )
            )
        return lines


def compare_regimes(
    survey: SurveySet,
    kinds: Sequence[str],
    seed: int,
    k: int = 10,
    params: LearnerParams = LearnerParams(),
    features: FeatureConfig = FeatureConfig(),
    general_kind: str | None = None,
) -> EvalReport:
    """Evaluate every regime per user and compare all regime pairs.

    Users with fewer than 2 responses cannot be cross-validated and are
    excluded from the report (listed under excluded_users, keeping one
    consistent user set across all columns).
    """
    if not kinds:
        raise ValueError("need at least one learner kind")
    general_kind = general_kind or kinds[0]
    general = train_general(
        survey, general_kind, derive_seed(seed, "general"), params, features
    )
    general_acc = evaluate_general_per_user(general, survey)
    users: list[UserEval] = []
    excluded: list[dict] = []
    for user_id in survey.user_ids:
        rs = survey.responses_by_user[user_id]
        if len(rs) < 2:
            excluded.append(
                {"user_id": user_id, "n_responses": len(rs), "reason": "fewer than 2 responses"}
            )
            continue
        baseline = majority_baseline(rs)
        adapted = {
            kind: cross_validate_user(survey, user_id, kind, k, seed, params, features)
            for kind in kinds
        }
        users.append(
            UserEval(
                user_id=user_id,
                n_responses=len(rs),
                n_filtered=sum(1 for r in rs if r.filter),
                accuracy_general=general_acc[user_id],
                accuracy_user_adapted=adapted,
                accuracy_majority=baseline.accuracy,
                majority_prediction=baseline.predicted,
            )
        )
    users.sort(key=lambda u: (u.n_filtered, u.user_id))
    report_config = {
        "seed": seed,
        "kinds": list(kinds),
        "general_kind": general_kind,
        "cv_folds": k,
        **params.to_dict(),
        **features.to_dict(),
    }
    regime_order = [REGIME_MAJORITY, REGIME_GENERAL] + list(kinds)
    accuracy_of = {
        REGIME_MAJORITY: [u.accuracy_majority for u in users],
        REGIME_GENERAL: [u.accuracy_general for u in users],
        **{kind: [u.accuracy_user_adapted[kind] for u in users] for kind in kinds},
    }
    comparisons = [
        compare_accuracies(a, b, accuracy_of[a], accuracy_of[b])
        for i, a in enumerate(regime_order)
        for b in regime_order[i + 1 :]
    ]
    return EvalReport(
        users=tuple(users),
        excluded_users=tuple(excluded),
        comparisons=tuple(comparisons),
        config=report_config,
    )


def vshape_correlations(report: EvalReport, kind: str) -> tuple[float, float]:
    """Spearman correlations of |filter rate - 0.5| against accuracy.

    |rate - 1/2| equals baseline accuracy minus 1/2, and that subtraction is
    exact for doubles in [1/2, 1], so the extremity is computed through the
    accuracy itself; the baseline correlation is then exactly 1.0 by
    construction rather than up to rounding.  The learner correlation
    measures how strongly the same V-shape shows up in its accuracies.
    """
    extremity = [u.accuracy_majority - 0.5 for u in report.users]
    baseline = spearman(extremity, [u.accuracy_majority for u in report.users])
    learner = spearman(extremity, [u.accuracy_user_adapted[kind] for u in report.users])
    return baseline, learner
