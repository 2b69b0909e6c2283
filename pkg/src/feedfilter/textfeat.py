"""Deterministic tokenization and sparse bag-of-words / TF-IDF features.

Everything here is a pure function of its inputs: the same corpus iterated
in the same order always yields the same vocabulary, index for index.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

@dataclass(frozen=True)
class FeatureConfig:
    """Feature-extraction switches shared by all filter regimes.

    mode "auto" lets each learner use its conventional representation
    (counts for Naive Bayes and random forest, TF-IDF for the SVM).
    """

    mode: str = "auto"  # auto | counts | tfidf
    min_df: int = 1
    stopwords: bool = False
    stem: bool = False

    def __post_init__(self):
        if self.mode not in ("auto", "counts", "tfidf"):
            raise ValueError(f"unknown feature mode: {self.mode!r}")
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")

    def to_dict(self) -> dict:
        return {
            "features.mode": self.mode,
            "features.min_df": self.min_df,
            "features.stopwords": self.stopwords,
            "features.stem": self.stem,
        }


_URL_RE = re.compile(r"(?:[a-z][a-z0-9+.-]*://\S*|(?<!\S)www\.\S*)")
_MENTION_RE = re.compile(r"(?<!\w)@\w+")
# Unicode alphanumerics without the underscore that \w would admit.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Small function-word list; only applied when stopwords=True.
STOPWORDS = frozenset(
    """a an and are as at be but by for from had has have he her his i if in is
    it its me my no not of on or our she so that the their them they this to
    was we were will with you your""".split()
)

_SUFFIXES = ("ing", "edly", "ed", "es", "s", "ly")


def _light_stem(token: str) -> str:
    # Conservative suffix stripping; never shortens below 3 characters.
    for suffix in _SUFFIXES:
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    return token


def tokenize(
    text: str,
    *,
    stopwords: bool = False,
    stem: bool = False,
) -> list[str]:
    """Lowercase, drop URLs and @mentions, split on non-alphanumerics.

    A leading '#' is split away so the hashtag word itself survives.
    """
    lowered = text.lower()
    lowered = _URL_RE.sub(" ", lowered)
    lowered = _MENTION_RE.sub(" ", lowered)
    tokens = _TOKEN_RE.findall(lowered)
    if stopwords:
        tokens = [t for t in tokens if t not in STOPWORDS]
    if stem:
        tokens = [_light_stem(t) for t in tokens]
    return tokens


@dataclass(frozen=True)
class SparseVector:
    """Sorted sparse feature vector: strictly increasing indices, nonzero weights."""

    indices: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must have equal length")
        for prev, cur in zip(self.indices, self.indices[1:]):
            if cur <= prev:
                raise ValueError("indices must be strictly increasing")
        for v in self.values:
            if not math.isfinite(v) or v == 0.0:
                raise ValueError(f"weights must be finite and nonzero, got {v!r}")

    def items(self):
        return zip(self.indices, self.values)

    def __len__(self) -> int:
        return len(self.indices)

    @staticmethod
    def from_mapping(weights: dict[int, float]) -> "SparseVector":
        pairs = sorted((i, w) for i, w in weights.items() if w != 0.0)
        return SparseVector(
            indices=tuple(i for i, _ in pairs),
            values=tuple(w for _, w in pairs),
        )


EMPTY_VECTOR = SparseVector(indices=(), values=())


@dataclass(frozen=True)
class Vocabulary:
    """Term index in first-seen order plus document frequencies."""

    index: dict[str, int]
    doc_freq: tuple[int, ...]
    total_documents: int

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, term: str) -> bool:
        return term in self.index


def build_vocabulary(
    documents: Iterable[Sequence[str]],
    min_df: int = 1,
) -> Vocabulary:
    """Index every term appearing in at least min_df documents.

    Index order is first-seen order over the given document iteration, so a
    deterministic corpus order yields a deterministic vocabulary.
    """
    df: dict[str, int] = {}
    total = 0
    for doc in documents:
        total += 1
        for term in dict.fromkeys(doc):  # unique, first-seen order
            df[term] = df.get(term, 0) + 1
    index: dict[str, int] = {}
    freqs: list[int] = []
    for term, count in df.items():
        if count >= min_df:
            index[term] = len(index)
            freqs.append(count)
    return Vocabulary(index=index, doc_freq=tuple(freqs), total_documents=total)


def vectorize(
    tokens: Sequence[str],
    vocab: Vocabulary,
    mode: str = "counts",
) -> SparseVector:
    """Map tokens to a sparse vector; out-of-vocabulary tokens are dropped.

    counts: raw term counts.
    tfidf:  tf * (ln((1+N)/(1+df)) + 1), L2-normalized.
    """
    if mode not in ("counts", "tfidf"):
        raise ValueError(f"unknown vectorize mode: {mode!r}")
    counts = Counter(t for t in tokens if t in vocab.index)
    if not counts:
        return EMPTY_VECTOR
    if mode == "counts":
        return SparseVector.from_mapping(
            {vocab.index[t]: float(c) for t, c in counts.items()}
        )
    n = vocab.total_documents
    weights: dict[int, float] = {}
    for term, count in counts.items():
        idx = vocab.index[term]
        idf = math.log((1 + n) / (1 + vocab.doc_freq[idx])) + 1.0
        weights[idx] = count * idf
    norm = math.sqrt(sum(w * w for w in weights.values()))
    return SparseVector.from_mapping({i: w / norm for i, w in weights.items()})
