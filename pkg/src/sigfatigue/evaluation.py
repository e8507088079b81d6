"""Scoring detections against ground truth, bootstrap intervals, sweeps.

Detections are matched to true change days greedily in order of
increasing absolute day gap (ties prefer the earlier detected date, then
the earlier true date); each side is used at most once and a pair only
counts within the policy tolerance.  Delay is detected minus true, so
negative values are early warnings.

Corpus scores are pooled counts (micro averages); confidence intervals
come from a seeded percentile bootstrap over series.  Benchmarking runs
detectors through a small registry so the signature method and the
reference baselines share one harness.  Following the published
protocol, the signature method is scored on its raw exceedance flags
(merging disabled); merged change points are an analyst-facing report
feature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import baselines
from .detector import DetectorConfig, detect
from .errors import InvalidInputError

__all__ = [
    "MatchPolicy",
    "EvalMetrics",
    "match_detections",
    "score",
    "pool_scores",
    "bootstrap_ci",
    "METHODS",
    "make_method",
    "evaluate_corpus",
    "parity_split",
    "grid_search",
    "sensitivity_report",
]


@dataclass(frozen=True)
class MatchPolicy:
    """How close (in days) a detection must land to count as a match."""

    tolerance_days: int = 3

    def __post_init__(self):
        if self.tolerance_days < 0:
            raise InvalidInputError(
                f"tolerance_days must be >= 0, got {self.tolerance_days}"
            )


@dataclass(frozen=True)
class EvalMetrics:
    precision: float
    recall: float
    f1: float
    mean_delay_days: float | None
    n_detected: int
    n_true: int
    n_matched: int
    delays: tuple = ()
    ci: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mean_delay_days": self.mean_delay_days,
            "n_detected": self.n_detected,
            "n_true": self.n_true,
            "n_matched": self.n_matched,
        }
        if self.ci is not None:
            out["ci"] = self.ci
        return out


def match_detections(detected, truth, policy: MatchPolicy = MatchPolicy()) -> list:
    """Greedy one-to-one matching of detected dates to true dates."""
    detected = sorted(detected)
    truth = sorted(truth)
    candidates = []
    for d in detected:
        for t in truth:
            gap = (d - t).days
            if abs(gap) <= policy.tolerance_days:
                candidates.append((abs(gap), d, t))
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    used_d, used_t, pairs = set(), set(), []
    for _, d, t in candidates:
        if d in used_d or t in used_t:
            continue
        used_d.add(d)
        used_t.add(t)
        pairs.append((d, t))
    pairs.sort(key=lambda p: p[1])
    return pairs


def _metrics_from_counts(n_detected, n_true, n_matched, delays) -> EvalMetrics:
    precision = n_matched / n_detected if n_detected else 0.0
    recall = n_matched / n_true if n_true else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    mean_delay = float(np.mean(delays)) if delays else None
    return EvalMetrics(
        precision=precision,
        recall=recall,
        f1=f1,
        mean_delay_days=mean_delay,
        n_detected=n_detected,
        n_true=n_true,
        n_matched=n_matched,
        delays=tuple(delays),
    )


def score(detected, truth, policy: MatchPolicy = MatchPolicy()) -> EvalMetrics:
    """Precision, recall, F1 and matched-pair delays for one series."""
    detected = list(detected)
    truth = list(truth)
    pairs = match_detections(detected, truth, policy)
    delays = [(d - t).days for d, t in pairs]
    return _metrics_from_counts(len(detected), len(truth), len(pairs), delays)


def pool_scores(scores) -> EvalMetrics:
    """Micro-averaged metrics over per-series scores."""
    scores = list(scores)
    if not scores:
        raise InvalidInputError("cannot pool zero scores")
    delays = [d for s in scores for d in s.delays]
    return _metrics_from_counts(
        sum(s.n_detected for s in scores),
        sum(s.n_true for s in scores),
        sum(s.n_matched for s in scores),
        delays,
    )


def bootstrap_ci(scores, n_boot: int = 100, level: float = 0.95, seed: int = 0) -> dict:
    """Percentile bootstrap over series for each pooled metric."""
    scores = list(scores)
    if len(scores) < 2:
        raise InvalidInputError("bootstrap needs at least 2 series")
    if not 0 < level < 1:
        raise InvalidInputError(f"level must be in (0, 1), got {level}")
    rng = np.random.default_rng(seed)
    samples = {"precision": [], "recall": [], "f1": [], "mean_delay_days": []}
    for _ in range(n_boot):
        idx = rng.integers(0, len(scores), size=len(scores))
        pooled = pool_scores([scores[i] for i in idx])
        samples["precision"].append(pooled.precision)
        samples["recall"].append(pooled.recall)
        samples["f1"].append(pooled.f1)
        samples["mean_delay_days"].append(
            np.nan if pooled.mean_delay_days is None else pooled.mean_delay_days
        )
    lo_q, hi_q = 100 * (1 - level) / 2, 100 * (1 + level) / 2
    out = {}
    for name, vals in samples.items():
        arr = np.asarray(vals, dtype=float)
        arr = arr[~np.isnan(arr)]
        if arr.size == 0:
            out[name] = None
        else:
            out[name] = {
                "lo": float(np.percentile(arr, lo_q)),
                "hi": float(np.percentile(arr, hi_q)),
            }
    return out


def _signature_method(**params):
    cfg = DetectorConfig(merge_gap=params.pop("merge_gap", 0), **params)

    def run(series):
        return [c.date for c in detect(series, cfg).change_points]

    return run


def _ma_method(**params):
    return lambda series: baselines.ma_crossover(series, **params)


def _cusum_method(**params):
    return lambda series: baselines.cusum(series, **params)


def _rolling_method(**params):
    return lambda series: baselines.rolling_regression(series, **params)


METHODS = {
    "signature": _signature_method,
    "ma_crossover": _ma_method,
    "cusum": _cusum_method,
    "rolling_regression": _rolling_method,
}


def make_method(name: str, **params):
    """Detector callable (series -> list of dates) from the registry."""
    if name not in METHODS:
        raise InvalidInputError(
            f"unknown method {name!r}, expected one of {sorted(METHODS)}"
        )
    return METHODS[name](**params)


def evaluate_corpus(
    corpus,
    method,
    policy: MatchPolicy = MatchPolicy(),
    n_boot: int = 100,
    seed: int = 0,
) -> tuple:
    """Score a method over a corpus.

    ``method`` is a registry name or a callable.  Returns
    (per-series scores, pooled EvalMetrics with bootstrap intervals).
    """
    run = make_method(method) if isinstance(method, str) else method
    per_series = []
    for item in corpus:
        detected = run(item.series)
        per_series.append(score(detected, item.truth_dates(), policy))
    pooled = pool_scores(per_series)
    ci = (
        bootstrap_ci(per_series, n_boot=n_boot, seed=seed)
        if n_boot >= 1 and len(per_series) >= 2
        else None
    )
    pooled = EvalMetrics(
        precision=pooled.precision,
        recall=pooled.recall,
        f1=pooled.f1,
        mean_delay_days=pooled.mean_delay_days,
        n_detected=pooled.n_detected,
        n_true=pooled.n_true,
        n_matched=pooled.n_matched,
        delays=pooled.delays,
        ci=ci,
    )
    return per_series, pooled


def parity_split(corpus) -> tuple:
    """50/50 train/validation split by series index parity."""
    corpus = list(corpus)
    return corpus[0::2], corpus[1::2]


def _grid_cells(grid: dict) -> list:
    names = sorted(grid)
    cells = []
    for values in itertools.product(*(grid[n] for n in names)):
        cells.append(dict(zip(names, values)))
    return cells


def grid_search(
    method: str,
    grid: dict,
    corpus,
    policy: MatchPolicy = MatchPolicy(),
    objective: str = "f1",
) -> tuple:
    """Exhaustive parameter search; returns (best params, best metrics, rows).

    Ties on the objective break toward the earlier (more negative) mean
    delay, then the earlier grid cell in lexicographic parameter order.
    """
    if not grid or not any(len(v) for v in grid.values()):
        raise InvalidInputError("parameter grid must be non-empty")
    corpus = list(corpus)
    if not corpus:
        raise InvalidInputError("validation corpus must be non-empty")
    rows = []
    for params in _grid_cells(grid):
        run = make_method(method, **params)
        _, pooled = evaluate_corpus(corpus, run, policy, n_boot=0, seed=0)
        rows.append((params, pooled))
    best_params, best_metrics = rows[0]
    for params, pooled in rows[1:]:
        cur = getattr(pooled, objective)
        best = getattr(best_metrics, objective)
        if cur > best:
            best_params, best_metrics = params, pooled
        elif cur == best:
            cur_delay = pooled.mean_delay_days
            best_delay = best_metrics.mean_delay_days
            cur_delay = float("inf") if cur_delay is None else cur_delay
            best_delay = float("inf") if best_delay is None else best_delay
            if cur_delay < best_delay:
                best_params, best_metrics = params, pooled
    return best_params, best_metrics, rows


def sensitivity_report(
    corpus,
    grid: dict | None = None,
    policy: MatchPolicy = MatchPolicy(),
    n_boot: int = 100,
    seed: int = 0,
) -> list:
    """One row of signature-method metrics per parameter-grid cell.

    The default grid sweeps window in {7, 14, 21} and threshold_k in
    {1.5, 2.0, 2.5} at depth 3.  Each row carries pooled metrics plus
    bootstrap intervals.
    """
    if grid is None:
        grid = {"window": [7, 14, 21], "threshold_k": [1.5, 2.0, 2.5], "depth": [3]}
    if not grid or not any(len(v) for v in grid.values()):
        raise InvalidInputError("parameter grid must be non-empty")
    corpus = list(corpus)
    rows = []
    for params in _grid_cells(grid):
        run = make_method("signature", **params)
        _, pooled = evaluate_corpus(corpus, run, policy, n_boot=n_boot, seed=seed)
        row = {
            "window": params.get("window"),
            "threshold_k": params.get("threshold_k"),
            "depth": params.get("depth"),
        }
        row.update(pooled.to_dict())
        rows.append(row)
    return rows
