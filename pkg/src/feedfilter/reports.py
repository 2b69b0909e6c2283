"""Assembly of the full analysis report: corpus aggregates plus the
statistical battery over the (category x intensity) filter-rate matrix.

The matrix groups per-category filter rates by the raters' perceived
intensity level; cells backed by fewer than min_cell_count responses are
dropped before testing, since a rate estimated from a handful of responses
carries no usable signal.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Mapping

from . import corpus as corpus_mod
from .corpus import NON_CODABLE, Category, SurveySet
from .stats import (
    StatConfig,
    anova_oneway,
    prop_diff_ci,
    tukey_hsd,
    wilcoxon_signed_rank,
)

MIN_CELL_COUNT = 5


def category_intensity_cells(
    survey: SurveySet,
) -> dict[tuple[Category, int], tuple[int, int]]:
    """(category, intensity) -> (n_responses, n_filtered) over codable messages."""
    totals: Counter[tuple[Category, int]] = Counter()
    filtered: Counter[tuple[Category, int]] = Counter()
    for r in survey.responses:
        cat = survey.message_by_id[r.message_id].resolved_category
        if cat is NON_CODABLE:
            continue
        key = (cat, r.intensity)
        totals[key] += 1
        if r.filter:
            filtered[key] += 1
    return {key: (totals[key], filtered[key]) for key in sorted(totals)}


def intensity_rate_groups(
    survey: SurveySet, min_cell_count: int = MIN_CELL_COUNT
) -> list[list[float]]:
    """Five groups (intensity 1..5) of per-category filter rates.

    Groups that end up with fewer than two usable cells are dropped, which
    keeps the downstream tests well defined on sparse surveys.
    """
    cells = category_intensity_cells(survey)
    groups = []
    for intensity in corpus_mod.INTENSITY_LEVELS:
        rates = [
            filtered / total
            for (cat, level), (total, filtered) in cells.items()
            if level == intensity and total >= min_cell_count
        ]
        if len(rates) >= 2:
            groups.append(rates)
    return groups


def _intensity_pair_tests(
    survey: SurveySet, min_cell_count: int
) -> list[dict]:
    """Paired Wilcoxon tests between intensity levels, paired by category."""
    cells = category_intensity_cells(survey)
    rates: dict[int, dict[Category, float]] = {}
    for (cat, level), (total, filtered) in cells.items():
        if total >= min_cell_count:
            rates.setdefault(level, {})[cat] = filtered / total
    results = []
    levels = sorted(rates)
    for pos, i in enumerate(levels):
        for j in levels[pos + 1 :]:
            common = sorted(set(rates[i]) & set(rates[j]))
            if not common:
                continue
            outcome = wilcoxon_signed_rank(
                [rates[i][c] for c in common], [rates[j][c] for c in common]
            )
            results.append(
                {
                    "intensity_a": i,
                    "intensity_b": j,
                    "n_categories": len(common),
                    **outcome.to_json_dict(),
                }
            )
    return results


def _proportion_ci_tables(
    survey: SurveySet, config: StatConfig
) -> dict[str, list[dict]]:
    """Pairwise category comparisons of filter proportions per intensity."""
    cells = category_intensity_cells(survey)
    by_level: dict[int, list[tuple[Category, int, int]]] = {}
    for (cat, level), (total, filtered) in cells.items():
        by_level.setdefault(level, []).append((cat, total, filtered))
    tables: dict[str, list[dict]] = {}
    for level in sorted(by_level):
        entries = sorted(by_level[level])
        rows = []
        for a in range(len(entries)):
            for b in range(a + 1, len(entries)):
                cat_a, n_a, s_a = entries[a]
                cat_b, n_b, s_b = entries[b]
                ci = prop_diff_ci(s_a, n_a, s_b, n_b, config)
                rows.append(
                    {
                        "category_a": int(cat_a),
                        "category_b": int(cat_b),
                        **ci.to_json_dict(),
                    }
                )
        tables[str(level)] = rows
    return tables


def full_analysis(
    survey: SurveySet,
    stat_config: StatConfig = StatConfig(),
    effective_config: Mapping | None = None,
    min_cell_count: int = MIN_CELL_COUNT,
) -> dict:
    """Corpus aggregates plus ANOVA/Tukey/Wilcoxon/proportion-CI sections."""
    report = corpus_mod.corpus_report(survey)
    groups = intensity_rate_groups(survey, min_cell_count)
    if len(groups) >= 2:
        anova = anova_oneway(groups).to_json_dict()
        tukey = tukey_hsd(groups, stat_config).to_json_dict()
    else:
        anova = {"error": "fewer than 2 intensity groups with enough data"}
        tukey = {"error": "fewer than 2 intensity groups with enough data"}
    report.update(
        {
            "anova": anova,
            "tukey": tukey,
            "wilcoxon": _intensity_pair_tests(survey, min_cell_count),
            "proportion_cis": _proportion_ci_tables(survey, stat_config),
            "deviations": survey.deviation_summary(),
            "config": dict(effective_config or {})
            | {"alpha": stat_config.alpha, "ci_rule": stat_config.ci_rule,
               "min_cell_count": min_cell_count},
        }
    )
    return report


def to_json(document: Mapping) -> str:
    """Canonical JSON for reports: sorted keys, two-space indent, newline."""
    return json.dumps(document, sort_keys=True, indent=2) + "\n"
