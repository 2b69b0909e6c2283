"""Command-line front door.

Subcommands: ingest, analyze, train-general, evaluate, simulate, serve.
Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import filters, reports, synthpop
from .config import RunConfig, default_config_text, load_config
from .corpus import DataError
from .stats import StatConfig

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the CLI contract
    # reserves 2 for data errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    parser = _Parser(prog="feedfilter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, data_required=True):
        p.add_argument("--data", required=data_required, help="directory with messages.jsonl and responses.csv")
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--learner", choices=["nb", "svm", "rf"], default=None)

    p = sub.add_parser("ingest", help="validate data files and print a summary")
    add_common(p)

    p = sub.add_parser("analyze", help="corpus reports plus the statistical battery")
    add_common(p)
    p.add_argument("--ci-rule", choices=["paper", "conventional"], default=None)
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("train-general", help="train the population-level filter")
    add_common(p)
    p.add_argument("--out", required=True, help="output path for the filter JSON")

    p = sub.add_parser("evaluate", help="compare general / user-adapted / majority regimes")
    add_common(p)
    p.add_argument("--kinds", default="nb", help="comma-separated learner kinds (default nb)")
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="also write per-user rows as CSV")

    p = sub.add_parser("simulate", help="generate a synthetic survey data set")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--users", type=int, default=60)
    p.add_argument("--messages", type=int, default=900)
    p.add_argument("--items", type=int, default=75, help="items per user")
    p.add_argument("--raters", type=int, default=5, help="raters per message")
    p.add_argument("--sigma", type=float, default=None, help="perception noise")
    p.add_argument("--epsilon", type=float, default=None, help="response flip probability")

    p = sub.add_parser("serve", help="run the live labeling HTTP service")
    add_common(p)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--warmup", type=int, default=None)
    p.add_argument("--response-log", help="append accepted responses to this CSV file")

    p = sub.add_parser("print-config", help="print the full default config file")
    return parser


def _effective_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = load_config(args.config, cfg)
    overrides = {}
    for flag, attr in (
        ("seed", "seed"),
        ("alpha", "alpha"),
        ("learner", "learner"),
        ("folds", "cv_folds"),
        ("ci_rule", "ci_rule"),
        ("port", "port"),
        ("warmup", "warmup"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[attr] = value
    return dataclasses.replace(cfg, **overrides)


def _load_survey(args) -> corpus_mod.SurveySet:
    survey, skipped = corpus_mod.load_survey(args.data)
    if skipped:
        print(f"note: skipped {skipped} malformed message line(s)", file=sys.stderr)
    return survey


def _emit(document: dict, out: str | None) -> None:
    text = reports.to_json(document)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_ingest(args) -> int:
    survey, skipped = corpus_mod.load_survey(args.data)
    summary = {
        "messages": len(survey.messages),
        "skipped_message_lines": skipped,
        "responses": len(survey.responses),
        "users": len(survey.user_ids),
        "category_frequencies": corpus_mod.category_frequencies(survey.messages).to_json_dict(),
        "deviations": survey.deviation_summary(),
    }
    _emit(summary, None)
    return 0


def _cmd_analyze(args) -> int:
    cfg = _effective_config(args)
    survey = _load_survey(args)
    stat_config = StatConfig(alpha=cfg.alpha, ci_rule=cfg.ci_rule)
    document = reports.full_analysis(survey, stat_config, cfg.to_dict())
    _emit(document, args.out)
    return 0


def _cmd_train_general(args) -> int:
    cfg = _effective_config(args)
    survey = _load_survey(args)
    general = filters.train_general(
        survey,
        cfg.learner,
        cfg.seed,
        cfg.learner_params(),
        cfg.feature_config(),
    )
    Path(args.out).write_text(filters.general_to_json(general), encoding="utf-8")
    print(
        f"trained {general.kind} general filter on {general.n_training_messages} messages",
        file=sys.stderr,
    )
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _effective_config(args)
    survey = _load_survey(args)
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    for kind in kinds:
        if kind not in ("nb", "svm", "rf"):
            raise UsageError(f"unknown learner kind: {kind!r}")
    report = filters.compare_regimes(
        survey,
        kinds,
        cfg.seed,
        k=cfg.cv_folds,
        params=cfg.learner_params(),
        features=cfg.feature_config(),
        general_kind=cfg.learner if cfg.learner in kinds else None,
    )
    _emit(report.to_json_dict(), args.out)
    if args.csv:
        Path(args.csv).write_text("\n".join(report.to_csv_lines()) + "\n", encoding="utf-8")
    return 0


def _cmd_simulate(args) -> int:
    overrides = {}
    if args.sigma is not None:
        overrides["sigma"] = args.sigma
    if args.epsilon is not None:
        overrides["epsilon"] = args.epsilon
    gen_config = synthpop.GenConfig(
        n_users=args.users,
        n_messages=args.messages,
        items_per_user=args.items,
        raters_per_message=args.raters,
        seed=args.seed,
        **overrides,
    )
    result = synthpop.generate(gen_config)
    synthpop.write_dataset(result, args.out)
    deviations = result.survey.deviation_summary()
    print(
        f"wrote {len(result.survey.messages)} messages, "
        f"{len(result.survey.responses)} responses to {args.out} "
        f"(coverage off target for {deviations['messages_off_target']} messages)",
        file=sys.stderr,
    )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _effective_config(args)
    survey = _load_survey(args)
    app = create_app(
        survey,
        cfg,
        response_log=Path(args.response_log) if args.response_log else None,
    )
    uvicorn.run(app, host=args.host, port=cfg.port, log_level="warning")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "analyze": _cmd_analyze,
    "train-general": _cmd_train_general,
    "evaluate": _cmd_evaluate,
    "simulate": _cmd_simulate,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "print-config":
            sys.stdout.write(default_config_text())
            return 0
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (DataError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
