"""Seeded generator of synthetic messages and rater populations.

The generative model is deliberately minimal: each message carries a latent
intensity for its category, each user holds a per-category tolerance
threshold, a rater perceives the latent intensity through Gaussian noise,
and filters a message exactly when the perceived level reaches the
category threshold (with a small response-flip probability).  Message text
spells out both the category and the rounded latent level through small
keyword pools, so the filtering rule is learnable from bags of words.

Everything is a pure function of the config seed; the same config yields a
bit-identical survey.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Category, Message, SurveySet, UserResponse, write_messages, write_responses

CATEGORY_KEYWORDS: dict[Category, tuple[str, ...]] = {
    Category.GENERAL_HARASSMENT: ("pest", "nuisance", "obnoxious", "bother", "goaway", "unwanted"),
    Category.CRUEL_STATEMENT: ("idiot", "pathetic", "worthless", "dumb", "loser", "failure"),
    Category.RELIGIOUS_RACIAL_ETHNIC: ("creed", "heritage", "origin", "outsider", "foreign", "tribe"),
    Category.SEXUAL_ORIENTATION: ("orientation", "pride", "closet", "flaunt", "lifestyle", "unnatural"),
    Category.SEX_GENDER: ("gender", "hysterical", "bossy", "shrill", "fragile", "emotional"),
    Category.THREAT: ("regret", "consequences", "watch", "hunt", "destroy", "payback"),
    Category.MULTIPLE_TYPES: (),  # mixes two other pools per message
    Category.NON_HARASSMENT: ("coffee", "sunny", "game", "music", "lunch", "weekend", "garden", "movie"),
}

INTENSITY_MARKERS: dict[int, tuple[str, ...]] = {
    1: ("plain", "calm"),
    2: ("mild", "slight"),
    3: ("pointed", "blunt"),
    4: ("harsh", "nasty"),
    5: ("vicious", "savage"),
}

FILLER_WORDS = ("you", "so", "just", "really", "today", "again", "always", "never", "people", "this")

# Latent-intensity band per category; non-harassment is pinned at 1.
MU_RANGES: dict[Category, tuple[float, float]] = {
    Category.GENERAL_HARASSMENT: (1.5, 3.5),
    Category.CRUEL_STATEMENT: (2.0, 4.0),
    Category.RELIGIOUS_RACIAL_ETHNIC: (2.0, 4.5),
    Category.SEXUAL_ORIENTATION: (2.0, 4.5),
    Category.SEX_GENDER: (2.0, 4.0),
    Category.THREAT: (3.0, 5.0),
    Category.MULTIPLE_TYPES: (2.5, 5.0),
    Category.NON_HARASSMENT: (1.0, 1.0),
}

# Roughly the observed corpus category mix, floored so every category
# shows up at desk-scale message counts.
DEFAULT_CATEGORY_WEIGHTS = (0.04, 0.20, 0.04, 0.03, 0.14, 0.07, 0.05, 0.43)


@dataclass(frozen=True)
class SynthUserProfile:
    """Ground-truth rating behavior for one synthetic user."""

    user_id: str
    thresholds: Mapping[Category, float]  # tolerance per category, in [0, 6]
    sigma: float  # perception noise
    epsilon: float  # probability of flipping the filter choice

    def __post_init__(self):
        for cat, tau in self.thresholds.items():
            if not math.isfinite(tau) or not 0.0 <= tau <= 6.0:
                raise ValueError(f"threshold for {cat} out of [0,6]: {tau}")
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be a probability")

    def to_json_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "thresholds": {str(int(c)): t for c, t in sorted(self.thresholds.items())},
            "sigma": self.sigma,
            "epsilon": self.epsilon,
        }


@dataclass(frozen=True)
class SynthMessage:
    """A generated message plus its latent true intensity."""

    id: str
    text: str
    annotations: tuple[int, ...]
    category: Category
    mu: float

    def __post_init__(self):
        if self.category is Category.NON_HARASSMENT and self.mu != 1.0:
            raise ValueError("non-harassment messages must have latent intensity 1")
        if not 1.0 <= self.mu <= 5.0:
            raise ValueError(f"latent intensity out of [1,5]: {self.mu}")


@dataclass(frozen=True)
class GenConfig:
    n_users: int = 60
    n_messages: int = 900
    items_per_user: int = 75
    raters_per_message: int = 5
    category_weights: tuple[float, ...] = DEFAULT_CATEGORY_WEIGHTS
    threshold_low: float = 1.0
    threshold_high: float = 6.0
    threshold_jitter: float = 1.0
    extreme_fraction: float = 0.25
    sigma: float = 1.0
    epsilon: float = 0.03
    annotator_accuracy: float = 0.9
    seed: int = 0

    def __post_init__(self):
        for name in ("n_users", "n_messages", "items_per_user", "raters_per_message"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if len(self.category_weights) != len(Category):
            raise ValueError("need one weight per category")
        if any(w < 0 for w in self.category_weights):
            raise ValueError("category weights must be nonnegative")
        if abs(sum(self.category_weights) - 1.0) > 1e-9:
            raise ValueError("category weights must sum to 1")
        if not 0.0 <= self.threshold_low <= self.threshold_high <= 6.0:
            raise ValueError("threshold range must satisfy 0 <= low <= high <= 6")
        if not 0.0 <= self.extreme_fraction <= 1.0:
            raise ValueError("extreme_fraction must be a probability")

    def to_dict(self) -> dict:
        return {
            "n_users": self.n_users,
            "n_messages": self.n_messages,
            "items_per_user": self.items_per_user,
            "raters_per_message": self.raters_per_message,
            "category_weights": list(self.category_weights),
            "threshold_low": self.threshold_low,
            "threshold_high": self.threshold_high,
            "threshold_jitter": self.threshold_jitter,
            "extreme_fraction": self.extreme_fraction,
            "sigma": self.sigma,
            "epsilon": self.epsilon,
            "annotator_accuracy": self.annotator_accuracy,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SynthResult:
    survey: SurveySet
    profiles: tuple[SynthUserProfile, ...]
    synth_messages: tuple[SynthMessage, ...]
    config: GenConfig


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _clamp_level(x: float) -> int:
    return min(5, max(1, _round_half_up(x)))


def _draw_category(rng: random.Random, weights: Sequence[float]) -> Category:
    r = rng.random()
    acc = 0.0
    for code, w in enumerate(weights):
        acc += w
        if r < acc:
            return Category(code)
    return Category(len(weights) - 1)


def _message_text(category: Category, mu: float, rng: random.Random) -> str:
    if category is Category.MULTIPLE_TYPES:
        pools = [c for c in Category if CATEGORY_KEYWORDS[c] and c is not Category.NON_HARASSMENT]
        first, second = rng.sample(pools, 2)
        keywords = [rng.choice(CATEGORY_KEYWORDS[first]), rng.choice(CATEGORY_KEYWORDS[second])]
        keywords.append(rng.choice(CATEGORY_KEYWORDS[first]))
    else:
        pool = CATEGORY_KEYWORDS[category]
        keywords = [rng.choice(pool) for _ in range(rng.randint(2, 3))]
    marker = rng.choice(INTENSITY_MARKERS[_clamp_level(mu)])
    fillers = [rng.choice(FILLER_WORDS) for _ in range(rng.randint(1, 3))]
    words = keywords + [marker] + fillers
    rng.shuffle(words)
    return " ".join(words)


def _annotations(category: Category, accuracy: float, rng: random.Random) -> tuple[int, ...]:
    out = []
    others = [int(c) for c in Category if c is not category]
    for _ in range(3):
        if rng.random() < accuracy:
            out.append(int(category))
        else:
            out.append(rng.choice(others))
    return tuple(out)


def default_profile(config: GenConfig, user_id: str) -> SynthUserProfile:
    """Base tolerance per user plus per-category jitter.

    A slice of the population (extreme_fraction, split evenly) consists of
    fully decided users who filter everything or nothing; the rest draw a
    base tolerance and correlated per-category thresholds around it.  The
    decided users reproduce the heavy end bins of the population histogram
    and answer without response noise.
    """
    rng = random.Random(f"{config.seed}:profile:{user_id}")
    draw = rng.random()
    if draw < config.extreme_fraction / 2.0:
        return SynthUserProfile(
            user_id=user_id,
            thresholds={c: 0.0 for c in Category},
            sigma=config.sigma,
            epsilon=0.0,
        )
    if draw < config.extreme_fraction:
        return SynthUserProfile(
            user_id=user_id,
            thresholds={c: 6.0 for c in Category},
            sigma=config.sigma,
            epsilon=0.0,
        )
    base = rng.uniform(config.threshold_low, config.threshold_high)
    thresholds = {
        c: min(6.0, max(0.5, base + rng.uniform(-config.threshold_jitter, config.threshold_jitter)))
        for c in Category
    }
    return SynthUserProfile(
        user_id=user_id,
        thresholds=thresholds,
        sigma=config.sigma,
        epsilon=config.epsilon,
    )


def generate(
    config: GenConfig,
    profiles: Sequence[SynthUserProfile] | None = None,
) -> SynthResult:
    """Generate a full survey: messages, user profiles, and responses.

    Every message receives exactly raters_per_message ratings when
    n_users * items_per_user == n_messages * raters_per_message; otherwise
    coverage is the cyclic best effort and deviation_summary on the survey
    reports the spread.
    """
    if config.items_per_user > config.n_messages:
        raise ValueError(
            f"infeasible assignment: items_per_user ({config.items_per_user}) "
            f"exceeds n_messages ({config.n_messages}), a user would repeat a message"
        )
    if profiles is None:
        profiles = tuple(
            default_profile(config, f"u{idx:04d}") for idx in range(config.n_users)
        )
    else:
        profiles = tuple(profiles)
        if len(profiles) != config.n_users:
            raise ValueError(
                f"got {len(profiles)} profiles for n_users={config.n_users}"
            )

    msg_rng = random.Random(f"{config.seed}:messages")
    synth_messages: list[SynthMessage] = []
    for i in range(config.n_messages):
        category = _draw_category(msg_rng, config.category_weights)
        lo, hi = MU_RANGES[category]
        mu = lo if lo == hi else msg_rng.uniform(lo, hi)
        synth_messages.append(
            SynthMessage(
                id=f"m{i:05d}",
                text=_message_text(category, mu, msg_rng),
                annotations=_annotations(category, config.annotator_accuracy, msg_rng),
                category=category,
                mu=mu,
            )
        )

    order = list(range(config.n_messages))
    random.Random(f"{config.seed}:assign").shuffle(order)
    responses: list[UserResponse] = []
    for u_idx, profile in enumerate(profiles):
        rng = random.Random(f"{config.seed}:resp:{profile.user_id}")
        start = u_idx * config.items_per_user
        for j in range(config.items_per_user):
            message = synth_messages[order[(start + j) % config.n_messages]]
            perceived = _clamp_level(message.mu + rng.gauss(0.0, profile.sigma))
            wants = perceived >= profile.thresholds[message.category]
            if rng.random() < profile.epsilon:
                wants = not wants
            responses.append(
                UserResponse(
                    user_id=profile.user_id,
                    message_id=message.id,
                    intensity=perceived,
                    filter=wants,
                )
            )

    survey = SurveySet(
        messages=tuple(
            Message(id=m.id, text=m.text, annotations=m.annotations)
            for m in synth_messages
        ),
        responses=tuple(responses),
        raters_per_message=config.raters_per_message,
        items_per_user=config.items_per_user,
    )
    return SynthResult(
        survey=survey,
        profiles=profiles,
        synth_messages=tuple(synth_messages),
        config=config,
    )


def write_dataset(result: SynthResult, out_dir: str | Path) -> None:
    """messages.jsonl + responses.csv in the ingestion formats, plus a
    profiles.json sidecar with the ground-truth profiles."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_messages(result.survey.messages, out_dir / "messages.jsonl")
    write_responses(result.survey.responses, out_dir / "responses.csv")
    sidecar = {
        "config": result.config.to_dict(),
        "profiles": [p.to_json_dict() for p in result.profiles],
    }
    (out_dir / "profiles.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
