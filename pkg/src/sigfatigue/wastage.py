"""Financial opportunity cost of running a fatigued creative.

The benchmark is the creative's own best period: the stable-or-improving
segment with the highest mean click-through rate.  Every day after that
segment, the clicks the creative would have earned at benchmark rate but
did not are priced at the benchmark cost per click.  Currency is opaque
and carried through from the input.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

from .detector import Segment
from .errors import ConfigurationError, InvalidInputError
from .windowing import TimeSeries

__all__ = [
    "DailyWastage",
    "WastageReport",
    "select_benchmark",
    "lost_clicks",
    "compute_wastage",
]


@dataclass(frozen=True)
class DailyWastage:
    date: dt.date
    lost_clicks: float
    wastage: float


@dataclass(frozen=True)
class WastageReport:
    benchmark: Segment
    benchmark_is_fallback: bool
    ctr_benchmark: float
    cpc_benchmark: float
    daily: tuple
    total_wastage: float

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "benchmark": {
                "start_date": self.benchmark.start_date.isoformat(),
                "end_date": self.benchmark.end_date.isoformat(),
                "trend": self.benchmark.trend,
                "mean_metric": self.benchmark.mean_metric,
            },
            "benchmark_is_fallback": self.benchmark_is_fallback,
            "ctr_benchmark": self.ctr_benchmark,
            "cpc_benchmark": self.cpc_benchmark,
            "daily": [
                {"date": d.date.isoformat(), "lost_clicks": d.lost_clicks, "wastage": d.wastage}
                for d in self.daily
            ],
            "total_wastage": self.total_wastage,
        }


def select_benchmark(segments) -> tuple:
    """Pick the benchmark segment.

    Returns (segment, is_fallback): the stable-or-improving segment with
    the highest mean metric, or, when every segment declines, the best
    segment overall with the fallback flag set.
    """
    segments = list(segments)
    if not segments:
        raise InvalidInputError("cannot select a benchmark from zero segments")
    eligible = [s for s in segments if s.trend in ("stable", "improving")]
    if eligible:
        return max(eligible, key=lambda s: (s.mean_metric, s.start_date.toordinal() * -1)), False
    return max(segments, key=lambda s: (s.mean_metric, s.start_date.toordinal() * -1)), True


def lost_clicks(ctr_bench: float, ctr_t: float, impressions_t: float) -> float:
    """Clicks forgone on a day relative to benchmark rate; never negative."""
    if ctr_bench < 0 or ctr_t < 0 or impressions_t < 0:
        raise InvalidInputError("lost_clicks inputs must be nonnegative")
    if ctr_bench > 1 or ctr_t > 1:
        raise InvalidInputError("click-through rates cannot exceed 1")
    return max(0.0, ctr_bench - ctr_t) * impressions_t


def _benchmark_cpc(series: TimeSeries, bench_points, user_cpc: float | None) -> float:
    costed = all(p.cost is not None for p in bench_points)
    total_clicks = sum(p.clicks for p in bench_points)
    if costed and total_clicks > 0:
        return sum(p.cost for p in bench_points) / total_clicks
    if user_cpc is not None:
        if user_cpc < 0:
            raise ConfigurationError("cpc must be nonnegative")
        return float(user_cpc)
    if costed:
        raise ConfigurationError(
            "benchmark segment has zero clicks, so cost data cannot yield a CPC; "
            "pass an explicit cpc"
        )
    raise ConfigurationError(
        "series has no cost column and no cpc was supplied; pass an explicit cpc"
    )


def compute_wastage(
    series: TimeSeries,
    segments,
    cpc: float | None = None,
) -> WastageReport:
    """Daily and total wastage for every date after the benchmark segment.

    The benchmark rate is the mean daily click-through rate over the
    benchmark segment.  The benchmark cost per click comes from the
    segment's cost data (total cost / total clicks) when present, else
    from the ``cpc`` argument.  Days that beat the benchmark clamp to
    zero rather than offsetting.
    """
    benchmark, fallback = select_benchmark(segments)
    bench_points = series.between(benchmark.start_date, benchmark.end_date)
    if not bench_points:
        raise InvalidInputError(
            "benchmark segment contains no observations of this series"
        )
    # fsum keeps the constant-rate case exactly at the shared value, so a
    # day matching the benchmark rate prices to exactly zero
    ctr_bench = math.fsum(p.ctr for p in bench_points) / len(bench_points)
    cpc_bench = _benchmark_cpc(series, bench_points, cpc)

    daily = []
    for p in series.points:
        if p.date <= benchmark.end_date:
            continue
        lost = lost_clicks(ctr_bench, p.ctr, p.impressions)
        daily.append(DailyWastage(date=p.date, lost_clicks=lost, wastage=lost * cpc_bench))
    total = math.fsum(d.wastage for d in daily)
    return WastageReport(
        benchmark=benchmark,
        benchmark_is_fallback=fallback,
        ctr_benchmark=ctr_bench,
        cpc_benchmark=cpc_bench,
        daily=tuple(daily),
        total_wastage=total,
    )
