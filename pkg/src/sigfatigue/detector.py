"""Signature-distance change point detection and trend segmentation.

The detector slides a pair of adjacent, non-overlapping windows across
the series.  Each window becomes a 2-D polyline (normalized time vs.
min-max scaled metric, scale shared across the pair), closed into a
loop through the origin: the path starts at (0, 0), rises to the first
observation, traverses the window and drops back to baseline at (1, 0).
Signatures are translation invariant, so without the closure two
windows sitting at different levels would be indistinguishable; with it
the enclosed-area terms encode each window's level while higher terms
keep their sensitivity to trend and volatility shape.  The Euclidean
distance between the truncated signatures of the two loops is the test
statistic; a boundary is flagged when its distance exceeds
mean + k * std of all distances.  Flag runs are merged, the series is
partitioned at the surviving change points, and each segment gets a
trend label from an ordinary least squares slope test.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InvalidInputError
from .sigcore import flatten, log_signature, path_signature
from .windowing import TimeSeries, normalize_window_pair, window_pairs

__all__ = [
    "DetectorConfig",
    "DistancePoint",
    "ChangePoint",
    "Segment",
    "ChangePointReport",
    "distance_series",
    "detect",
    "classify_trend",
    "segment_series",
]

FEATURE_MODES = ("full", "log")


@dataclass(frozen=True)
class DetectorConfig:
    """Detection parameters.

    ``window`` is counted in observations.  ``threshold_k`` scales the
    flagging threshold mean + k * std.  ``merge_gap`` is the maximum
    day spacing at which exceedance flags are absorbed into a single
    change point; ``None`` means "same as window", 0 disables merging.
    ``feature_mode`` selects the full signature vector or its tensor
    logarithm as the feature fed to the distance.
    """

    window: int = 14
    depth: int = 3
    threshold_k: float = 2.0
    alpha: float = 0.05
    merge_gap: int | None = None
    feature_mode: str = "full"

    def __post_init__(self):
        if self.window < 2:
            raise InvalidInputError(f"window must be >= 2, got {self.window}")
        if self.depth < 1:
            raise InvalidInputError(f"depth must be >= 1, got {self.depth}")
        if not self.threshold_k > 0:
            raise InvalidInputError(f"threshold_k must be > 0, got {self.threshold_k}")
        if not 0 < self.alpha < 1:
            raise InvalidInputError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.merge_gap is not None and self.merge_gap < 0:
            raise InvalidInputError(f"merge_gap must be >= 0, got {self.merge_gap}")
        if self.feature_mode not in FEATURE_MODES:
            raise InvalidInputError(
                f"feature_mode must be one of {FEATURE_MODES}, got {self.feature_mode!r}"
            )

    @property
    def effective_merge_gap(self) -> int:
        return self.window if self.merge_gap is None else self.merge_gap

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "depth": self.depth,
            "threshold_k": self.threshold_k,
            "alpha": self.alpha,
            "merge_gap": self.effective_merge_gap,
            "feature_mode": self.feature_mode,
        }


@dataclass(frozen=True)
class DistancePoint:
    boundary_date: dt.date
    distance: float


@dataclass(frozen=True)
class ChangePoint:
    date: dt.date
    distance: float
    threshold: float


@dataclass(frozen=True)
class Segment:
    start_date: dt.date
    end_date: dt.date
    trend: str
    slope: float
    p_value: float
    mean_metric: float
    n_points: int


@dataclass(frozen=True)
class ChangePointReport:
    config: DetectorConfig
    metric: str
    distances: tuple
    mean_distance: float
    std_distance: float
    threshold: float
    change_points: tuple
    segments: tuple

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "config": self.config.to_dict(),
            "metric": self.metric,
            "mean_distance": self.mean_distance,
            "std_distance": self.std_distance,
            "threshold": self.threshold,
            "distances": [
                {"date": d.boundary_date.isoformat(), "distance": d.distance}
                for d in self.distances
            ],
            "change_points": [
                {
                    "date": c.date.isoformat(),
                    "distance": c.distance,
                    "threshold": c.threshold,
                }
                for c in self.change_points
            ],
            "segments": [
                {
                    "start_date": s.start_date.isoformat(),
                    "end_date": s.end_date.isoformat(),
                    "trend": s.trend,
                    "slope": s.slope,
                    "p_value": s.p_value,
                    "mean_metric": s.mean_metric,
                    "n_points": s.n_points,
                }
                for s in self.segments
            ],
        }


def _looped(path) -> np.ndarray:
    # close the window path through the baseline so window level survives
    # the signature's translation invariance
    pts = path.points
    out = np.empty((pts.shape[0] + 2, 2))
    out[0] = (0.0, 0.0)
    out[1:-1] = pts
    out[-1] = (1.0, 0.0)
    return out


def _feature(path, cfg: DetectorConfig) -> np.ndarray:
    sig = path_signature(_looped(path), cfg.depth)
    if cfg.feature_mode == "log":
        sig = log_signature(sig)
    return flatten(sig)


def distance_series(series: TimeSeries, cfg: DetectorConfig) -> list:
    """Signature distance at every window-pair boundary, in date order."""
    out = []
    for pair in window_pairs(series, cfg.window):
        left, right = normalize_window_pair(pair.left, pair.right, series.metric)
        dist = float(
            np.linalg.norm(_feature(left, cfg) - _feature(right, cfg))
        )
        out.append(DistancePoint(boundary_date=pair.boundary_date, distance=dist))
    return out


def _merge_flags(flags: list, merge_gap: int) -> list:
    """Absorb flags into their strongest neighbour within ``merge_gap`` days.

    Flags are visited in decreasing distance order (ties: earlier date);
    a flag within merge_gap days of an already emitted change point is
    absorbed by it.  Raising the threshold only truncates the visit
    order, so the emitted set at a higher threshold is always a subset
    of the emitted set at a lower one.
    """
    emitted = []
    for flag in sorted(flags, key=lambda f: (-f.distance, f.boundary_date)):
        if any(
            abs((flag.boundary_date - e.boundary_date).days) <= merge_gap
            for e in emitted
        ):
            continue
        emitted.append(flag)
    return sorted(emitted, key=lambda f: f.boundary_date)


def classify_trend(points, metric: str = "ctr", alpha: float = 0.05) -> tuple:
    """OLS slope of the metric on day offsets plus a two-sided t-test.

    Returns (trend, slope, p_value).  Slopes are in metric units per
    day.  Segments with fewer than 3 points are stable with p = 1.
    """
    points = tuple(points)
    n = len(points)
    if n < 2:
        return "stable", 0.0, 1.0
    d0 = points[0].date
    x = np.array([(p.date - d0).days for p in points], dtype=float)
    y = np.array([p.metric(metric) for p in points], dtype=float)
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean()) / sxx)
    if n < 3:
        return "stable", slope, 1.0
    resid = y - (y.mean() + slope * xc)
    ssr = float(resid @ resid)
    se = np.sqrt(ssr / (n - 2) / sxx)
    if se == 0.0:
        p_value = 1.0 if slope == 0.0 else 0.0
    else:
        p_value = float(2.0 * stats.t.sf(abs(slope) / se, n - 2))
    if p_value < alpha and slope > 0:
        return "improving", slope, p_value
    if p_value < alpha and slope < 0:
        return "declining", slope, p_value
    return "stable", slope, p_value


def segment_series(series: TimeSeries, change_dates, alpha: float = 0.05) -> list:
    """Partition the series span at change point dates and label trends.

    n change points produce n + 1 contiguous calendar segments; each
    change point date starts a new segment.
    """
    change_dates = sorted(set(change_dates))
    for d in change_dates:
        if not (series.start_date <= d <= series.end_date):
            raise InvalidInputError(
                f"change point {d} outside series span "
                f"[{series.start_date}, {series.end_date}]"
            )
    bounds = [series.start_date] + list(change_dates)
    segments = []
    for i, start in enumerate(bounds):
        end = (
            bounds[i + 1] - dt.timedelta(days=1)
            if i + 1 < len(bounds)
            else series.end_date
        )
        pts = series.between(start, end)
        trend, slope, p_value = classify_trend(pts, series.metric, alpha)
        mean_metric = (
            float(np.mean([p.metric(series.metric) for p in pts])) if pts else 0.0
        )
        segments.append(
            Segment(
                start_date=start,
                end_date=end,
                trend=trend,
                slope=slope,
                p_value=p_value,
                mean_metric=mean_metric,
                n_points=len(pts),
            )
        )
    return segments


def detect(series: TimeSeries, cfg: DetectorConfig | None = None) -> ChangePointReport:
    """Full detection pipeline: distances, threshold, merge, segment."""
    cfg = cfg or DetectorConfig()
    distances = distance_series(series, cfg)
    values = np.array([d.distance for d in distances])
    mean = float(values.mean())
    std = float(values.std())  # population form: deterministic for n = 1
    threshold = mean + cfg.threshold_k * std
    flags = [d for d in distances if d.distance > threshold]
    merged = _merge_flags(flags, cfg.effective_merge_gap)
    change_points = tuple(
        ChangePoint(date=f.boundary_date, distance=f.distance, threshold=threshold)
        for f in merged
    )
    segments = tuple(
        segment_series(series, [c.date for c in change_points], cfg.alpha)
    )
    return ChangePointReport(
        config=cfg,
        metric=series.metric,
        distances=tuple(distances),
        mean_distance=mean,
        std_distance=std,
        threshold=threshold,
        change_points=change_points,
        segments=segments,
    )
