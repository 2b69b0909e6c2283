"""Message corpus: data model, file ingestion, and survey aggregate analytics.

A corpus is a set of short messages, each carrying up to three annotator
category codes that resolve to a single category by strict majority (no
majority means non-codable).  Survey responses attach a per-user perceived
intensity (1..5) and a binary filter choice to messages.  The aggregate
operations here summarise filtering behaviour by category, by intensity,
by user, and by inter-rater agreement.
"""

from __future__ import annotations

import csv
import enum
import json
import unicodedata
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union


class DataError(Exception):
    """Unrecoverable problem in an input file or data set."""


class InvalidAnnotationError(DataError):
    """An annotation code is outside the known category range."""


class Category(enum.IntEnum):
    """The eight message categories; codes are stable across the toolkit."""

    GENERAL_HARASSMENT = 0
    CRUEL_STATEMENT = 1
    RELIGIOUS_RACIAL_ETHNIC = 2
    SEXUAL_ORIENTATION = 3
    SEX_GENDER = 4
    THREAT = 5
    MULTIPLE_TYPES = 6
    NON_HARASSMENT = 7

    @property
    def display_name(self) -> str:
        return _CATEGORY_NAMES[self]


_CATEGORY_NAMES = {
    Category.GENERAL_HARASSMENT: "General harassment",
    Category.CRUEL_STATEMENT: "Cruel statement",
    Category.RELIGIOUS_RACIAL_ETHNIC: "Religious/racial/ethnic",
    Category.SEXUAL_ORIENTATION: "Sexual orientation",
    Category.SEX_GENDER: "Sex/gender",
    Category.THREAT: "Threat",
    Category.MULTIPLE_TYPES: "Multiple types",
    Category.NON_HARASSMENT: "Non-harassment",
}

INTENSITY_LEVELS = (1, 2, 3, 4, 5)
INTENSITY_NAMES = {1: "None", 2: "Minimal", 3: "Moderate", 4: "High", 5: "Extreme"}


class _NonCodable:
    """Out-of-band marker for messages without a strict-majority category.

    Never a valid training label; compared by identity (``is NON_CODABLE``).
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NonCodable"


NON_CODABLE = _NonCodable()

ResolvedCategory = Union[Category, _NonCodable]


def majority_category(annotations: Sequence[int]) -> ResolvedCategory:
    """Resolve annotator codes to the strict-majority category.

    Returns NON_CODABLE when no code holds a strict majority, including the
    empty list and full ties.  Codes outside 0..7 raise
    InvalidAnnotationError.
    """
    for code in annotations:
        if not isinstance(code, int) or isinstance(code, bool) or not 0 <= code <= 7:
            raise InvalidAnnotationError(f"annotation code out of range 0..7: {code!r}")
    if not annotations:
        return NON_CODABLE
    counts = Counter(annotations)
    code, best = counts.most_common(1)[0]
    if best * 2 > len(annotations):
        return Category(code)
    return NON_CODABLE


@dataclass(frozen=True)
class Message:
    """One short text item with optional annotator category codes."""

    id: str
    text: str
    annotations: tuple[int, ...] = ()

    @property
    def resolved_category(self) -> ResolvedCategory:
        return majority_category(self.annotations)


@dataclass(frozen=True)
class UserResponse:
    """One survey answer: a user's perceived intensity and filter choice."""

    user_id: str
    message_id: str
    intensity: int
    filter: bool

    def __post_init__(self):
        if self.intensity not in INTENSITY_LEVELS:
            raise DataError(
                f"intensity must be 1..5, got {self.intensity!r} "
                f"(user {self.user_id}, message {self.message_id})"
            )


@dataclass(frozen=True)
class SurveySet:
    """Immutable bundle of messages and per-user responses.

    raters_per_message and items_per_user are descriptive targets; real data
    may deviate, and deviation_summary() reports by how much.
    """

    messages: tuple[Message, ...]
    responses: tuple[UserResponse, ...]
    raters_per_message: int = 5
    items_per_user: int = 75

    def __post_init__(self):
        ids = [m.id for m in self.messages]
        if len(set(ids)) != len(ids):
            dup = next(i for i, c in Counter(ids).items() if c > 1)
            raise DataError(f"duplicate message id: {dup!r}")
        known = set(ids)
        seen_pairs = set()
        for r in self.responses:
            if r.message_id not in known:
                raise DataError(
                    f"response references unknown message id {r.message_id!r} "
                    f"(user {r.user_id})"
                )
            pair = (r.user_id, r.message_id)
            if pair in seen_pairs:
                raise DataError(f"duplicate response for user/message pair {pair!r}")
            seen_pairs.add(pair)

    @cached_property
    def message_by_id(self) -> Mapping[str, Message]:
        return {m.id: m for m in self.messages}

    @cached_property
    def responses_by_user(self) -> Mapping[str, tuple[UserResponse, ...]]:
        grouped: dict[str, list[UserResponse]] = defaultdict(list)
        for r in self.responses:
            grouped[r.user_id].append(r)
        return {u: tuple(rs) for u, rs in grouped.items()}

    @cached_property
    def responses_by_message(self) -> Mapping[str, tuple[UserResponse, ...]]:
        grouped: dict[str, list[UserResponse]] = defaultdict(list)
        for r in self.responses:
            grouped[r.message_id].append(r)
        return {m: tuple(rs) for m, rs in grouped.items()}

    @property
    def user_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.responses_by_user))

    def deviation_summary(self) -> dict:
        """Counts of messages/users that miss the descriptive targets."""
        off_messages = sum(
            1
            for rs in self.responses_by_message.values()
            if len(rs) != self.raters_per_message
        )
        off_users = sum(
            1
            for rs in self.responses_by_user.values()
            if len(rs) != self.items_per_user
        )
        return {
            "raters_per_message_target": self.raters_per_message,
            "messages_off_target": off_messages,
            "items_per_user_target": self.items_per_user,
            "users_off_target": off_users,
        }


# ---------------------------------------------------------------------------
# Ingestion


def normalize_text(text: str) -> str:
    # NFC so that byte-level duplicates of the same glyphs compare equal.
    return unicodedata.normalize("NFC", text).strip()


def load_messages(path: str | Path) -> tuple[list[Message], int]:
    """Read a JSON-lines message file.

    Returns (messages, skipped) where skipped counts malformed lines.
    Duplicate ids and unreadable files are fatal.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read message file {path}: {exc}") from exc
    messages: list[Message] = []
    seen: set[str] = set()
    skipped = 0
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            msg_id = record["id"]
            text = normalize_text(record["text"])
            annotations = tuple(record.get("annotations", ()))
            if not isinstance(msg_id, str) or not isinstance(record["text"], str):
                raise TypeError("id and text must be strings")
            if not text:
                raise ValueError("text empty after normalization")
            if len(annotations) > 3:
                raise ValueError("more than 3 annotations")
            majority_category(annotations)  # validates the codes
        except InvalidAnnotationError:
            skipped += 1
            continue
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            skipped += 1
            continue
        if msg_id in seen:
            raise DataError(f"duplicate message id {msg_id!r} at line {lineno}")
        seen.add(msg_id)
        messages.append(Message(id=msg_id, text=text, annotations=annotations))
    return messages, skipped


RESPONSE_HEADER = ["user_id", "tweet_id", "intensity", "filter"]


def load_responses(path: str | Path) -> list[UserResponse]:
    """Read a response CSV (header user_id,tweet_id,intensity,filter).

    Any malformed row is fatal and the error names the line number.
    """
    path = Path(path)
    try:
        handle = path.open(encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read response file {path}: {exc}") from exc
    responses: list[UserResponse] = []
    seen: set[tuple[str, str]] = set()
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != RESPONSE_HEADER:
            raise DataError(
                f"{path}: line 1: expected header {','.join(RESPONSE_HEADER)!r}, "
                f"got {header!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
            user_id, message_id, raw_intensity, raw_filter = row
            try:
                intensity = int(raw_intensity)
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}: intensity not an integer: {raw_intensity!r}"
                ) from None
            if intensity not in INTENSITY_LEVELS:
                raise DataError(f"{path}: line {lineno}: intensity out of range 1..5: {intensity}")
            if raw_filter not in ("0", "1"):
                raise DataError(f"{path}: line {lineno}: filter must be 0 or 1: {raw_filter!r}")
            pair = (user_id, message_id)
            if pair in seen:
                raise DataError(f"{path}: line {lineno}: duplicate response for {pair!r}")
            seen.add(pair)
            responses.append(
                UserResponse(
                    user_id=user_id,
                    message_id=message_id,
                    intensity=intensity,
                    filter=raw_filter == "1",
                )
            )
    return responses


def load_survey(
    data_dir: str | Path,
    raters_per_message: int = 5,
    items_per_user: int = 75,
) -> tuple[SurveySet, int]:
    """Load messages.jsonl + responses.csv from a directory.

    Returns (survey, skipped_message_lines).
    """
    data_dir = Path(data_dir)
    messages, skipped = load_messages(data_dir / "messages.jsonl")
    responses_path = data_dir / "responses.csv"
    responses = load_responses(responses_path) if responses_path.exists() else []
    survey = SurveySet(
        messages=tuple(messages),
        responses=tuple(responses),
        raters_per_message=raters_per_message,
        items_per_user=items_per_user,
    )
    return survey, skipped


def write_messages(messages: Iterable[Message], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as out:
        for m in messages:
            record = {"id": m.id, "text": m.text, "annotations": list(m.annotations)}
            out.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_responses(responses: Iterable[UserResponse], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as out:
        out.write(",".join(RESPONSE_HEADER) + "\n")
        for r in responses:
            out.write(f"{r.user_id},{r.message_id},{r.intensity},{int(r.filter)}\n")


# ---------------------------------------------------------------------------
# Aggregates


@dataclass(frozen=True)
class CategoryFrequencies:
    """Per-category message counts; only observed categories appear."""

    counts: Mapping[Category, int]
    non_codable: int
    total: int

    def to_json_dict(self) -> dict:
        return {
            "counts": {str(int(c)): n for c, n in sorted(self.counts.items())},
            "non_codable": self.non_codable,
            "total": self.total,
        }


def category_frequencies(messages: Iterable[Message]) -> CategoryFrequencies:
    """Count messages per resolved category (Table-style corpus summary)."""
    counts: Counter[Category] = Counter()
    non_codable = 0
    total = 0
    for m in messages:
        total += 1
        resolved = m.resolved_category
        if resolved is NON_CODABLE:
            non_codable += 1
        else:
            counts[resolved] += 1
    return CategoryFrequencies(counts=dict(counts), non_codable=non_codable, total=total)


def _codable_responses(survey: SurveySet):
    """Responses whose message resolves to a real category."""
    for r in survey.responses:
        resolved = survey.message_by_id[r.message_id].resolved_category
        if resolved is not NON_CODABLE:
            yield r, resolved


def filter_rate_by_category(survey: SurveySet) -> dict[Category, float]:
    """Fraction of responses choosing to filter, per resolved category.

    Responses on non-codable messages are excluded; categories with no
    responses are absent from the result.
    """
    totals: Counter[Category] = Counter()
    filtered: Counter[Category] = Counter()
    for r, cat in _codable_responses(survey):
        totals[cat] += 1
        if r.filter:
            filtered[cat] += 1
    return {cat: filtered[cat] / totals[cat] for cat in sorted(totals)}


def filter_rate_by_category_intensity(
    survey: SurveySet,
) -> dict[tuple[Category, int], float]:
    """Filter rate keyed by (resolved category, responder's intensity rating)."""
    totals: Counter[tuple[Category, int]] = Counter()
    filtered: Counter[tuple[Category, int]] = Counter()
    for r, cat in _codable_responses(survey):
        key = (cat, r.intensity)
        totals[key] += 1
        if r.filter:
            filtered[key] += 1
    return {key: filtered[key] / totals[key] for key in sorted(totals)}


def user_filter_histogram(survey: SurveySet) -> dict[int, int]:
    """Histogram: number of filtered items -> number of users."""
    per_user = Counter(
        sum(1 for r in rs if r.filter) for rs in survey.responses_by_user.values()
    )
    return dict(sorted(per_user.items()))


@dataclass(frozen=True)
class AgreementDistribution:
    """Split of fully-rated messages by how much their raters agreed.

    Only messages with exactly raters_per_message responses are classified;
    messages with some other positive response count are tallied in
    n_unclassified.  votes maps each classified message to its filter-vote
    count.
    """

    unanimous: float
    majority: float
    maximal_disagreement: float
    votes: Mapping[str, int]
    n_classified: int
    n_unclassified: int

    def to_json_dict(self) -> dict:
        return {
            "unanimous": self.unanimous,
            "majority": self.majority,
            "maximal_disagreement": self.maximal_disagreement,
            "votes": dict(sorted(self.votes.items())),
            "n_classified": self.n_classified,
            "n_unclassified": self.n_unclassified,
        }


def agreement_distribution(survey: SurveySet) -> AgreementDistribution:
    """Classify fully-rated messages as unanimous / majority / maximal split.

    With 5 raters: 5-0 or 0-5 is unanimous, 4-1 or 1-4 majority, 3-2 or 2-3
    maximal disagreement.  The three fractions sum to 1 over classified
    messages.
    """
    k = survey.raters_per_message
    votes: dict[str, int] = {}
    n_unclassified = 0
    tallies = {"unanimous": 0, "majority": 0, "maximal": 0}
    for message_id, rs in survey.responses_by_message.items():
        if len(rs) != k:
            n_unclassified += 1
            continue
        yes = sum(1 for r in rs if r.filter)
        votes[message_id] = yes
        minority = min(yes, k - yes)
        if minority == 0:
            tallies["unanimous"] += 1
        elif minority == 1:
            tallies["majority"] += 1
        else:
            tallies["maximal"] += 1
    n_classified = len(votes)
    if n_classified:
        unanimous = tallies["unanimous"] / n_classified
        majority = tallies["majority"] / n_classified
        maximal = tallies["maximal"] / n_classified
    else:
        unanimous = majority = maximal = 0.0
    return AgreementDistribution(
        unanimous=unanimous,
        majority=majority,
        maximal_disagreement=maximal,
        votes=votes,
        n_classified=n_classified,
        n_unclassified=n_unclassified,
    )


def corpus_report(survey: SurveySet) -> dict:
    """All five aggregate reports as one JSON-serialisable document."""
    by_cat = filter_rate_by_category(survey)
    by_cat_int = filter_rate_by_category_intensity(survey)
    nested: dict[str, dict[str, float]] = {}
    for (cat, intensity), rate in by_cat_int.items():
        nested.setdefault(str(int(cat)), {})[str(intensity)] = rate
    return {
        "category_frequencies": category_frequencies(survey.messages).to_json_dict(),
        "filter_rate_by_category": {str(int(c)): v for c, v in by_cat.items()},
        "filter_rate_by_category_intensity": nested,
        "user_filter_histogram": {str(k): v for k, v in user_filter_histogram(survey).items()},
        "agreement_distribution": agreement_distribution(survey).to_json_dict(),
    }
