"""Command-line interface.

Subcommands:

  generate   write synthetic series (CSV) plus ground-truth manifests
  detect     change point report (JSON, optional SVG plot) for one CSV
  wastage    detection plus financial wastage report for one CSV
  evaluate   score a detection method against a corpus's ground truth
  sweep      signature-method metrics over a parameter grid

Exit codes: 0 success, 2 invalid arguments or malformed input, 3 series
too short for the requested analysis.  All outputs are deterministic
given identical flags and seeds.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .detector import DetectorConfig, detect
from .errors import (
    ConfigurationError,
    InsufficientDataError,
    InvalidInputError,
    PatternSpecError,
    SigFatigueError,
)
from .evaluation import (
    MatchPolicy,
    evaluate_corpus,
    make_method,
    sensitivity_report,
)
from .plots import report_svg
from .synth import (
    PATTERN_KINDS,
    GeneratedSeries,
    GroundTruth,
    PatternSpec,
    generate,
    generate_batch,
)
from .wastage import compute_wastage
from .windowing import read_series_csv, write_series_csv

SCHEMA_VERSION = 1


def _dump_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _manifest(item: GeneratedSeries) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "spec": item.spec.to_dict(),
        "ground_truth": {
            "change_days": list(item.truth.change_days),
            "change_dates": [d.isoformat() for d in item.truth_dates()],
        },
    }


def _detector_config(args) -> DetectorConfig:
    return DetectorConfig(
        window=args.window,
        depth=args.depth,
        threshold_k=args.k,
        alpha=args.alpha,
        merge_gap=args.merge_gap,
        feature_mode=args.feature_mode,
    )


def _add_detector_flags(parser) -> None:
    parser.add_argument("--window", type=int, default=14, help="window size in observations")
    parser.add_argument("--depth", type=int, default=3, help="signature truncation depth")
    parser.add_argument("--k", type=float, default=2.0, help="threshold multiplier")
    parser.add_argument("--alpha", type=float, default=0.05, help="trend-test significance level")
    parser.add_argument(
        "--merge-gap",
        type=int,
        default=None,
        help="merge flags within this many days (default: window; 0 disables)",
    )
    parser.add_argument(
        "--feature-mode", choices=("full", "log"), default="full",
        help="distance features: full signature or its tensor logarithm",
    )
    parser.add_argument("--metric", default="ctr", help="series column to analyse")


def _add_pattern_flags(parser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--pattern", choices=PATTERN_KINDS, help="pattern kind")
    group.add_argument("--all", action="store_true", help="every pattern kind")
    parser.add_argument("--n", type=int, default=1, help="series per pattern")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--baseline-ctr", type=float, default=None)
    parser.add_argument("--weekly-decay", type=float, default=None)
    parser.add_argument("--noise-cv", type=float, default=None)
    parser.add_argument("--duration", type=int, default=None)
    parser.add_argument("--impressions-mean", type=int, default=None)
    parser.add_argument("--gap-fraction", type=float, default=None)
    parser.add_argument("--drop-factor", type=float, default=None)
    parser.add_argument("--n-stages", type=int, default=None)
    parser.add_argument("--stage-drop", type=float, default=None)
    parser.add_argument("--base-kind", choices=PATTERN_KINDS, default=None)
    parser.add_argument(
        "--change-days", default=None,
        help="comma-separated ground-truth change days (overrides defaults)",
    )
    parser.add_argument("--start-date", default=None, help="first day, ISO format")


def _pattern_overrides(args) -> dict:
    overrides = {}
    for attr, field in (
        ("baseline_ctr", "baseline_ctr"),
        ("weekly_decay", "weekly_decay_rate"),
        ("noise_cv", "noise_cv"),
        ("duration", "duration_days"),
        ("impressions_mean", "impressions_mean"),
        ("gap_fraction", "gap_fraction"),
        ("drop_factor", "drop_factor"),
        ("n_stages", "n_stages"),
        ("stage_drop", "stage_drop"),
        ("base_kind", "base_kind"),
    ):
        value = getattr(args, attr)
        if value is not None:
            overrides[field] = value
    if args.change_days is not None:
        overrides["change_days"] = tuple(
            int(d) for d in str(args.change_days).split(",") if d.strip()
        )
    if args.start_date is not None:
        overrides["start_date"] = dt.date.fromisoformat(args.start_date)
    return overrides


def _build_corpus(args) -> list:
    kinds = list(PATTERN_KINDS) if args.all else [args.pattern]
    return generate_batch(kinds, args.n, args.seed, overrides=_pattern_overrides(args))


def _load_corpus(directory: str) -> list:
    root = Path(directory)
    manifests = sorted(root.glob("*.manifest.json"))
    if not manifests:
        raise InvalidInputError(f"no *.manifest.json files found in {directory}")
    corpus = []
    for mpath in manifests:
        data = json.loads(mpath.read_text(encoding="utf-8"))
        csv_path = mpath.with_name(mpath.name.replace(".manifest.json", ".csv"))
        if not csv_path.exists():
            raise InvalidInputError(f"missing series file {csv_path}")
        series = read_series_csv(csv_path)
        spec_dict = dict(data["spec"])
        spec_dict["start_date"] = dt.date.fromisoformat(spec_dict["start_date"])
        if spec_dict.get("change_days") is not None:
            spec_dict["change_days"] = tuple(spec_dict["change_days"])
        spec = PatternSpec(**spec_dict)
        truth = GroundTruth(change_days=tuple(data["ground_truth"]["change_days"]))
        corpus.append(GeneratedSeries(spec=spec, series=series, truth=truth))
    return corpus


def cmd_generate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    overrides = _pattern_overrides(args)
    kinds = list(PATTERN_KINDS) if args.all else [args.pattern]
    written = 0
    if args.n == 1 and not args.all:
        # single fully specified series: honor the seed directly
        spec = PatternSpec(kind=args.pattern, seed=args.seed, **overrides)
        series, truth = generate(spec)
        items = [GeneratedSeries(spec=spec, series=series, truth=truth)]
    else:
        items = generate_batch(kinds, args.n, args.seed, overrides=overrides)
    counters = {}
    for item in items:
        idx = counters.get(item.spec.kind, 0)
        counters[item.spec.kind] = idx + 1
        stem = f"{item.spec.kind}_{idx:04d}"
        write_series_csv(item.series, out_dir / f"{stem}.csv")
        _dump_json(_manifest(item), str(out_dir / f"{stem}.manifest.json"))
        written += 1
    print(f"wrote {written} series to {out_dir}")
    return 0


def cmd_detect(args) -> int:
    series = read_series_csv(args.input, metric=args.metric)
    if args.method != "signature":
        params = _method_params(args)
        dates = make_method(args.method, **params)(series)
        _dump_json(
            {
                "schema_version": SCHEMA_VERSION,
                "method": args.method,
                "params": params,
                "change_points": [{"date": d.isoformat()} for d in dates],
            },
            args.out,
        )
        return 0
    cfg = _detector_config(args)
    report = detect(series, cfg)
    payload = {"method": "signature", **report.to_dict()}
    _dump_json(payload, args.out)
    if args.plot:
        svg = report_svg(series, report, title=Path(args.input).stem)
        Path(args.plot).write_text(svg, encoding="utf-8")
    return 0


def cmd_wastage(args) -> int:
    series = read_series_csv(args.input, metric=args.metric)
    cfg = _detector_config(args)
    report = detect(series, cfg)
    wreport = compute_wastage(series, report.segments, cpc=args.cpc)
    _dump_json(wreport.to_dict(), args.out)
    if args.daily_csv:
        lines = ["date,lost_clicks,wastage"]
        for d in wreport.daily:
            lines.append(f"{d.date.isoformat()},{d.lost_clicks!r},{d.wastage!r}")
        Path(args.daily_csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _method_params(args) -> dict:
    if args.method == "signature":
        return {
            "window": args.window,
            "depth": args.depth,
            "threshold_k": args.k,
            "feature_mode": args.feature_mode,
        }
    if args.method == "ma_crossover":
        return {"short_window": args.short_window, "long_window": args.long_window}
    if args.method == "cusum":
        return {"reference_k": args.reference_k, "decision_h": args.decision_h}
    if args.method == "rolling_regression":
        return {"window": args.window, "alpha": args.alpha}
    return {}


def _run_one(payload):
    item, method, params = payload
    run = make_method(method, **params)
    return run(item.series)


def cmd_evaluate(args) -> int:
    corpus = _load_corpus(args.corpus) if args.corpus else _build_corpus(args)
    params = _method_params(args)
    policy = MatchPolicy(tolerance_days=args.tolerance)
    if args.jobs > 1:
        from .evaluation import pool_scores, bootstrap_ci, score, EvalMetrics

        payloads = [(item, args.method, params) for item in corpus]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            detections = list(pool.map(_run_one, payloads))
        per_series = [
            score(found, item.truth_dates(), policy)
            for found, item in zip(detections, corpus)
        ]
        pooled = pool_scores(per_series)
        ci = bootstrap_ci(per_series, seed=args.seed) if len(per_series) >= 2 else None
        pooled = EvalMetrics(**{**pooled.to_dict(), "delays": pooled.delays, "ci": ci})
    else:
        _, pooled = evaluate_corpus(
            corpus, make_method(args.method, **params), policy, seed=args.seed
        )
    result = {
        "schema_version": SCHEMA_VERSION,
        "method": args.method,
        "params": params,
        "tolerance_days": args.tolerance,
        "n_series": len(corpus),
        "metrics": pooled.to_dict(),
    }
    _dump_json(result, args.out)
    return 0


def _parse_floats(text: str) -> list:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _parse_ints(text: str) -> list:
    return [int(v) for v in str(text).split(",") if v.strip()]


def cmd_sweep(args) -> int:
    corpus = _load_corpus(args.corpus) if args.corpus else _build_corpus(args)
    grid = {
        "window": _parse_ints(args.windows),
        "threshold_k": _parse_floats(args.ks),
        "depth": _parse_ints(args.depths),
    }
    rows = sensitivity_report(
        corpus,
        grid,
        MatchPolicy(tolerance_days=args.tolerance),
        n_boot=args.bootstrap,
        seed=args.seed,
    )
    _dump_json({"schema_version": SCHEMA_VERSION, "rows": rows}, args.out)
    if args.csv:
        cols = [
            "window", "threshold_k", "depth",
            "precision", "recall", "f1", "mean_delay_days",
            "n_detected", "n_true", "n_matched",
        ]
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join("" if row[c] is None else repr(row[c]) for c in cols))
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigfatigue",
        description="Signature-based change point detection for campaign performance series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write synthetic series and manifests")
    _add_pattern_flags(p_gen)
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.set_defaults(func=cmd_generate)

    p_det = sub.add_parser("detect", help="change point report for a series CSV")
    p_det.add_argument("input", help="input CSV (date,impressions,clicks[,cost])")
    _add_detector_flags(p_det)
    p_det.add_argument(
        "--method",
        default="signature",
        choices=sorted(("signature", "ma_crossover", "cusum", "rolling_regression")),
        help="detector to run; non-signature methods emit a tagged date list",
    )
    p_det.add_argument("--short-window", type=int, default=7)
    p_det.add_argument("--long-window", type=int, default=28)
    p_det.add_argument("--reference-k", type=float, default=0.5)
    p_det.add_argument("--decision-h", type=float, default=5.0)
    p_det.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p_det.add_argument("--plot", default=None, help="also write an SVG plot here")
    p_det.set_defaults(func=cmd_detect)

    p_was = sub.add_parser("wastage", help="financial wastage report for a series CSV")
    p_was.add_argument("input", help="input CSV")
    _add_detector_flags(p_was)
    p_was.add_argument("--cpc", type=float, default=None, help="cost per click override")
    p_was.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p_was.add_argument("--daily-csv", default=None, help="write daily rows here")
    p_was.set_defaults(func=cmd_wastage)

    p_eval = sub.add_parser("evaluate", help="score a method against ground truth")
    p_eval.add_argument("--corpus", default=None, help="directory of generated series")
    _add_pattern_flags(p_eval)
    p_eval.add_argument(
        "--method",
        default="signature",
        choices=sorted(("signature", "ma_crossover", "cusum", "rolling_regression")),
    )
    _add_detector_flags(p_eval)
    p_eval.add_argument("--tolerance", type=int, default=3, help="match tolerance in days")
    p_eval.add_argument("--short-window", type=int, default=7)
    p_eval.add_argument("--long-window", type=int, default=28)
    p_eval.add_argument("--reference-k", type=float, default=0.5)
    p_eval.add_argument("--decision-h", type=float, default=5.0)
    p_eval.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_eval.add_argument("--out", default=None, help="metrics JSON path (default stdout)")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="signature metrics over a parameter grid")
    p_sweep.add_argument("--corpus", default=None, help="directory of generated series")
    _add_pattern_flags(p_sweep)
    p_sweep.add_argument("--windows", default="7,14,21")
    p_sweep.add_argument("--ks", default="1.5,2.0,2.5")
    p_sweep.add_argument("--depths", default="3")
    p_sweep.add_argument("--tolerance", type=int, default=3)
    p_sweep.add_argument("--bootstrap", type=int, default=100)
    p_sweep.add_argument("--out", default=None, help="rows JSON path (default stdout)")
    p_sweep.add_argument("--csv", default=None, help="also write rows as CSV here")
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (PatternSpecError, ConfigurationError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SigFatigueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
