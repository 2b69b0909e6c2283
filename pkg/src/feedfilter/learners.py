"""Three from-scratch binary classifiers under one fit/predict contract.

Multinomial Naive Bayes with Laplace smoothing, a linear SVM trained by
stochastic subgradient descent on the L2-regularized hinge loss, and a
random forest with Gini splits over bootstrap samples.  Every tie rule
resolves to "no filter" (False) so ambiguous content stays visible.

Models are value objects: fitting is deterministic given (kind, data,
seed), prediction is pure, and serialization round-trips bit-exactly
through JSON.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .textfeat import SparseVector

KINDS = ("nb", "svm", "rf")

MODEL_FORMAT = 1


@dataclass(frozen=True)
class LearnerParams:
    """Hyperparameters; defaults are recorded into every experiment report."""

    nb_alpha: float = 1.0
    svm_lambda: float = 1e-4
    svm_epochs: int = 100
    rf_trees: int = 100

    def to_dict(self) -> dict:
        return {
            "nb.alpha": self.nb_alpha,
            "svm.lambda": self.svm_lambda,
            "svm.epochs": self.svm_epochs,
            "rf.trees": self.rf_trees,
        }


@dataclass(frozen=True)
class TrainingSet:
    vectors: tuple[SparseVector, ...]
    labels: tuple[bool, ...]
    n_features: int

    def __post_init__(self):
        if len(self.vectors) != len(self.labels):
            raise ValueError("vectors and labels must have equal length")
        if not self.vectors:
            raise ValueError("training set must contain at least one example")
        for v in self.vectors:
            if v.indices and v.indices[-1] >= self.n_features:
                raise ValueError("vector index exceeds feature count")

    def __len__(self) -> int:
        return len(self.vectors)


def _dense_matrix(training: TrainingSet) -> np.ndarray:
    x = np.zeros((len(training), training.n_features))
    for row, vec in enumerate(training.vectors):
        for idx, val in vec.items():
            x[row, idx] = val
    return x


# ---------------------------------------------------------------------------
# Naive Bayes


@dataclass(frozen=True)
class NaiveBayesModel:
    training_seed: int
    n_features: int
    classes: tuple[bool, ...]  # classes seen in training, False before True
    log_prior: tuple[float, ...]
    log_likelihood: tuple[tuple[float, ...], ...]  # [class][term]

    kind = "nb"

    def log_joint(self, vector: SparseVector) -> dict[bool, float]:
        """Unnormalized per-class log posterior for the given counts vector."""
        scores = {}
        for c, prior, likes in zip(self.classes, self.log_prior, self.log_likelihood):
            scores[c] = prior + sum(val * likes[idx] for idx, val in vector.items())
        return scores

    def predict(self, vector: SparseVector) -> bool:
        scores = self.log_joint(vector)
        if len(scores) == 1:
            return next(iter(scores))
        return scores[True] > scores[False]  # tie resolves to False


def _fit_nb(training: TrainingSet, seed: int, params: LearnerParams) -> NaiveBayesModel:
    alpha = params.nb_alpha
    classes = tuple(sorted(set(training.labels)))
    n = len(training)
    v = training.n_features
    log_prior = []
    log_likelihood = []
    for c in classes:
        rows = [vec for vec, label in zip(training.vectors, training.labels) if label == c]
        log_prior.append(math.log(len(rows) / n))
        term_counts = [0.0] * v
        total = 0.0
        for vec in rows:
            for idx, val in vec.items():
                term_counts[idx] += val
                total += val
        denom = total + alpha * v
        log_likelihood.append(
            tuple(math.log((term_counts[t] + alpha) / denom) for t in range(v))
        )
    return NaiveBayesModel(
        training_seed=seed,
        n_features=v,
        classes=classes,
        log_prior=tuple(log_prior),
        log_likelihood=tuple(log_likelihood),
    )


# ---------------------------------------------------------------------------
# Linear SVM


@dataclass(frozen=True)
class LinearSvmModel:
    training_seed: int
    n_features: int
    weights: tuple[float, ...]
    bias: float
    # Per-epoch regularized hinge objective, kept for diagnostics only;
    # not part of the serialized model.
    objective_trace: tuple[float, ...] = field(default=(), compare=False)

    kind = "svm"

    def decision(self, vector: SparseVector) -> float:
        return sum(val * self.weights[idx] for idx, val in vector.items()) + self.bias

    def predict(self, vector: SparseVector) -> bool:
        return self.decision(vector) > 0.0  # exact zero resolves to False


def _svm_objective(w: np.ndarray, b: float, x: np.ndarray, y: np.ndarray, lam: float) -> float:
    margins = y * (x @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins).mean()
    return float(0.5 * lam * (w @ w) + hinge)


def _fit_svm(training: TrainingSet, seed: int, params: LearnerParams) -> LinearSvmModel:
    labels = set(training.labels)
    if len(labels) == 1:
        only = labels.pop()
        return LinearSvmModel(
            training_seed=seed,
            n_features=training.n_features,
            weights=(0.0,) * training.n_features,
            bias=1.0 if only else -1.0,
        )
    lam = params.svm_lambda
    x = _dense_matrix(training)
    y = np.where(np.asarray(training.labels), 1.0, -1.0)
    n = len(training)
    w = np.zeros(training.n_features)
    b = 0.0
    rng = random.Random(seed)
    order = list(range(n))
    t = 0
    objectives = []
    for _ in range(params.svm_epochs):
        rng.shuffle(order)
        for i in order:
            t += 1
            eta = 1.0 / (lam * t)
            margin = y[i] * (x[i] @ w + b)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * y[i] * x[i]
                b += eta * y[i]
        objectives.append(_svm_objective(w, b, x, y, lam))
    return LinearSvmModel(
        training_seed=seed,
        n_features=training.n_features,
        weights=tuple(float(v) for v in w),
        bias=float(b),
        objective_trace=tuple(objectives),
    )


# ---------------------------------------------------------------------------
# Random forest

# A tree is either a leaf {"predict": bool} or a split
# {"feature": int, "threshold": float, "left": tree, "right": tree};
# splits send feature values < threshold to the left child.
Tree = dict


def _majority(labels: np.ndarray) -> bool:
    yes = int(labels.sum())
    return yes * 2 > len(labels)  # tie resolves to False


def _best_split(
    x: np.ndarray, y: np.ndarray, features: np.ndarray
) -> tuple[int, float] | None:
    n = len(y)
    total_true = y.sum()
    best = None  # (weighted_gini, feature, threshold)
    for f in features:
        col = x[:, f]
        order = np.argsort(col, kind="stable")
        col_sorted = col[order]
        true_prefix = np.cumsum(y[order])
        cut = np.nonzero(col_sorted[:-1] < col_sorted[1:])[0]
        if cut.size == 0:
            continue
        n_left = cut + 1.0
        n_right = n - n_left
        t_left = true_prefix[cut]
        t_right = total_true - t_left
        p_left = t_left / n_left
        p_right = t_right / n_right
        gini = (
            n_left * 2.0 * p_left * (1.0 - p_left)
            + n_right * 2.0 * p_right * (1.0 - p_right)
        ) / n
        pos = int(np.argmin(gini))
        score = float(gini[pos])
        if best is None or score < best[0]:
            idx = cut[pos]
            threshold = float((col_sorted[idx] + col_sorted[idx + 1]) / 2.0)
            best = (score, int(f), threshold)
    if best is None:
        return None
    return best[1], best[2]


def _grow_tree(x: np.ndarray, y: np.ndarray, n_draw: int, rng: np.random.Generator) -> Tree:
    if len(y) < 2 or y.all() or not y.any() or n_draw == 0:
        return {"predict": _majority(y)}
    features = np.sort(rng.choice(x.shape[1], size=n_draw, replace=False))
    split = _best_split(x, y, features)
    if split is None:
        return {"predict": _majority(y)}
    feature, threshold = split
    mask = x[:, feature] < threshold
    return {
        "feature": feature,
        "threshold": threshold,
        "left": _grow_tree(x[mask], y[mask], n_draw, rng),
        "right": _grow_tree(x[~mask], y[~mask], n_draw, rng),
    }


def _tree_predict(tree: Tree, values: dict[int, float]) -> bool:
    while "predict" not in tree:
        if values.get(tree["feature"], 0.0) < tree["threshold"]:
            tree = tree["left"]
        else:
            tree = tree["right"]
    return tree["predict"]


@dataclass(frozen=True)
class RandomForestModel:
    training_seed: int
    n_features: int
    trees: tuple[Tree, ...]

    kind = "rf"

    def predict(self, vector: SparseVector) -> bool:
        values = dict(vector.items())
        votes = sum(1 for tree in self.trees if _tree_predict(tree, values))
        return votes * 2 > len(self.trees)  # tie resolves to False


def _fit_rf(training: TrainingSet, seed: int, params: LearnerParams) -> RandomForestModel:
    x = _dense_matrix(training)
    y = np.asarray(training.labels, dtype=bool)
    n = len(training)
    v = training.n_features
    n_draw = math.isqrt(v - 1) + 1 if v else 0  # ceil(sqrt(V))
    rng = np.random.Generator(np.random.PCG64(seed))
    trees = []
    for _ in range(params.rf_trees):
        sample = rng.integers(0, n, size=n)
        trees.append(_grow_tree(x[sample], y[sample], n_draw, rng))
    return RandomForestModel(
        training_seed=seed, n_features=training.n_features, trees=tuple(trees)
    )


# ---------------------------------------------------------------------------
# Common contract

ClassifierModel = Union[NaiveBayesModel, LinearSvmModel, RandomForestModel]

_FITTERS = {"nb": _fit_nb, "svm": _fit_svm, "rf": _fit_rf}


def fit(
    kind: str,
    training: TrainingSet,
    seed: int,
    params: LearnerParams = LearnerParams(),
) -> ClassifierModel:
    """Train a classifier of the given kind; deterministic under the seed."""
    if kind not in _FITTERS:
        raise ValueError(f"unknown learner kind: {kind!r}")
    return _FITTERS[kind](training, seed, params)


def predict(model: ClassifierModel, vector: SparseVector) -> bool:
    return model.predict(vector)


def accuracy(model: ClassifierModel, test: TrainingSet) -> float:
    if not test.vectors:
        raise ValueError("test set must contain at least one example")
    correct = sum(
        1 for vec, label in zip(test.vectors, test.labels) if model.predict(vec) == label
    )
    return correct / len(test)


# ---------------------------------------------------------------------------
# Serialization


def serialize_model(model: ClassifierModel) -> str:
    """Versioned JSON; floats round-trip exactly via shortest-repr encoding."""
    doc: dict = {
        "format": MODEL_FORMAT,
        "kind": model.kind,
        "seed": model.training_seed,
        "n_features": model.n_features,
    }
    if isinstance(model, NaiveBayesModel):
        doc["classes"] = list(model.classes)
        doc["log_prior"] = list(model.log_prior)
        doc["log_likelihood"] = [list(row) for row in model.log_likelihood]
    elif isinstance(model, LinearSvmModel):
        doc["weights"] = list(model.weights)
        doc["bias"] = model.bias
    elif isinstance(model, RandomForestModel):
        doc["trees"] = list(model.trees)
    else:
        raise TypeError(f"not a classifier model: {model!r}")
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def deserialize_model(payload: str) -> ClassifierModel:
    doc = json.loads(payload)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format: {doc.get('format')!r}")
    kind = doc.get("kind")
    if kind == "nb":
        return NaiveBayesModel(
            training_seed=doc["seed"],
            n_features=doc["n_features"],
            classes=tuple(bool(c) for c in doc["classes"]),
            log_prior=tuple(doc["log_prior"]),
            log_likelihood=tuple(tuple(row) for row in doc["log_likelihood"]),
        )
    if kind == "svm":
        return LinearSvmModel(
            training_seed=doc["seed"],
            n_features=doc["n_features"],
            weights=tuple(doc["weights"]),
            bias=doc["bias"],
        )
    if kind == "rf":
        return RandomForestModel(
            training_seed=doc["seed"],
            n_features=doc["n_features"],
            trees=tuple(doc["trees"]),
        )
    raise ValueError(f"unknown model kind: {kind!r}")
