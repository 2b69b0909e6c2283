"""Run configuration shared by the CLI and the service.

A config file is plain ``key=value`` text, one entry per line, with ``#``
comments; keys use the dotted names below and mirror every default, so a
full effective config can be echoed into reports and read back unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .learners import LearnerParams
from .textfeat import FeatureConfig


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    alpha: float = 0.05
    learner: str = "nb"
    port: int = 8080
    warmup: int = 5
    cv_folds: int = 10
    ci_rule: str = "paper"
    feature_mode: str = "auto"
    min_df: int = 1
    stopwords: bool = False
    stem: bool = False
    nb_alpha: float = 1.0
    svm_lambda: float = 1e-4
    svm_epochs: int = 100
    rf_trees: int = 100

    def learner_params(self) -> LearnerParams:
        return LearnerParams(
            nb_alpha=self.nb_alpha,
            svm_lambda=self.svm_lambda,
            svm_epochs=self.svm_epochs,
            rf_trees=self.rf_trees,
        )

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(
            mode=self.feature_mode,
            min_df=self.min_df,
            stopwords=self.stopwords,
            stem=self.stem,
        )

    def to_dict(self) -> dict:
        return {dotted: getattr(self, attr) for dotted, attr in _KEY_MAP.items()}


# Dotted config-file key -> RunConfig attribute.
_KEY_MAP = {
    "seed": "seed",
    "alpha": "alpha",
    "learner": "learner",
    "service.port": "port",
    "service.warmup": "warmup",
    "cv.folds": "cv_folds",
    "stats.ci_rule": "ci_rule",
    "features.mode": "feature_mode",
    "features.min_df": "min_df",
    "features.stopwords": "stopwords",
    "features.stem": "stem",
    "nb.alpha": "nb_alpha",
    "svm.lambda": "svm_lambda",
    "svm.epochs": "svm_epochs",
    "rf.trees": "rf_trees",
}

_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _parse_value(attr: str, raw: str):
    kind = RunConfig.__dataclass_fields__[attr].type
    raw = raw.strip()
    if kind == "bool":
        if raw.lower() not in _BOOL_VALUES:
            raise ValueError(f"expected a boolean for {attr}, got {raw!r}")
        return _BOOL_VALUES[raw.lower()]
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def load_config(path: str | Path, base: RunConfig = RunConfig()) -> RunConfig:
    """Apply key=value lines from a file on top of the given base config."""
    updates = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}: line {lineno}: expected key=value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _KEY_MAP:
            raise ValueError(f"{path}: line {lineno}: unknown config key {key!r}")
        attr = _KEY_MAP[key]
        try:
            updates[attr] = _parse_value(attr, raw)
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None
    return replace(base, **updates)


def default_config_text() -> str:
    """The full default config in file form (for --config templates)."""
    cfg = RunConfig()
    lines = [f"{dotted}={getattr(cfg, attr)}" for dotted, attr in _KEY_MAP.items()]
    return "\n".join(lines) + "\n"
