#!/usr/bin/env python3
"""End-to-end experiment: simulate a population, analyze it, compare regimes.

Writes everything into a run directory:

    data/            messages.jsonl, responses.csv, profiles.json
    analysis.json    corpus aggregates + statistical battery
    evaluation.json  per-user accuracies, win/lose/tie, Wilcoxon tests
    evaluation.csv   per-user rows
"""

import argparse
import json
import sys
import time
from pathlib import Path

from feedfilter.config import RunConfig
from feedfilter.corpus import load_survey
from feedfilter.filters import compare_regimes, vshape_correlations
from feedfilter.reports import full_analysis, to_json
from feedfilter.stats import StatConfig
from feedfilter.synthpop import GenConfig, generate, write_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="runs/default", help="run directory")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--users", type=int, default=60)
    parser.add_argument("--messages", type=int, default=900)
    parser.add_argument("--kinds", default="nb,svm,rf")
    parser.add_argument("--alpha", type=float, default=0.05)
    args = parser.parse_args()

    outdir = Path(args.outdir)
    data_dir = outdir / "data"
    kinds = [k for k in args.kinds.split(",") if k]

    started = time.time()
    print(f"simulating {args.users} users x {args.messages} messages (seed {args.seed})")
    result = generate(GenConfig(n_users=args.users, n_messages=args.messages, seed=args.seed))
    write_dataset(result, data_dir)

    survey, _ = load_survey(data_dir)
    run_config = RunConfig(seed=args.seed, alpha=args.alpha)

    print("running the statistical battery")
    analysis = full_analysis(survey, StatConfig(alpha=args.alpha), run_config.to_dict())
    (outdir / "analysis.json").write_text(to_json(analysis), encoding="utf-8")

    print(f"comparing regimes for kinds: {', '.join(kinds)}")
    report = compare_regimes(survey, kinds, seed=args.seed)
    (outdir / "evaluation.json").write_text(to_json(report.to_json_dict()), encoding="utf-8")
    (outdir / "evaluation.csv").write_text(
        "\n".join(report.to_csv_lines()) + "\n", encoding="utf-8"
    )

    print()
    print(f"mean accuracy  general   {report.mean_accuracy('general'):.3f}")
    print(f"               majority  {report.mean_accuracy('majority'):.3f}")
    for kind in kinds:
        print(f"               {kind:<9} {report.mean_accuracy(kind):.3f}")
    anova = analysis["anova"]
    print(
        f"intensity ANOVA: F({anova['df_between']},{anova['df_within']}) = "
        f"{anova['F']:.3f}, p = {anova['p_value']:.3e}, eta2 = {anova['eta_squared']:.3f}"
    )
    for pair in report.comparisons:
        w = pair.wilcoxon
        print(
            f"{pair.regime_a:>9} vs {pair.regime_b:<9} win/lose/tie "
            f"{pair.win:>3}/{pair.lose:>3}/{pair.tie:>3}   Wilcoxon p = "
            + (f"{w.p_value:.3e} ({w.method})" if w.method != "no-test" else "no-test")
        )
    for kind in kinds:
        baseline_corr, learner_corr = vshape_correlations(report, kind)
        print(f"V-shape Spearman vs extremity: baseline {baseline_corr:.3f}, {kind} {learner_corr:.3f}")
    print(f"\ndone in {time.time() - started:.1f}s -> {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
