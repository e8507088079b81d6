"""Reference change point detectors for benchmarking.

Deliberately simple, deterministic implementations of the classical
techniques the signature detector is compared against.  Each returns
the list of dates it flags on the series' analysis metric.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .errors import DegenerateInputError, InsufficientDataError, InvalidInputError
from .windowing import TimeSeries

__all__ = ["ma_crossover", "cusum", "rolling_regression"]


def ma_crossover(series: TimeSeries, short_window: int = 7, long_window: int = 28) -> list:
    """Dates where the short moving average crosses below the long one.

    Decline-oriented: a flag fires on each day the short average moves
    from at-or-above the long average to strictly below it.  Averages
    are trailing and counted in observations.
    """
    if short_window < 1 or short_window >= long_window:
        raise InvalidInputError(
            f"need 1 <= short_window < long_window, got {short_window}, {long_window}"
        )
    n = len(series)
    if n < long_window + 1:
        raise InsufficientDataError(
            f"series has {n} observations, need at least {long_window + 1}"
        )
    values = series.metric_values()
    dates = series.dates()

    # fsum keeps equal-valued windows exactly equal, so flat stretches do
    # not produce spurious crossings from accumulated rounding
    def trailing_mean(end_idx: int, width: int) -> float:
        return math.fsum(values[end_idx + 1 - width : end_idx + 1]) / width

    flags = []
    above = None
    for i in range(long_window - 1, n):
        short = trailing_mean(i, short_window)
        long = trailing_mean(i, long_window)
        now_above = short >= long
        if above is True and not now_above:
            flags.append(dates[i])
        above = now_above
    return flags


def cusum(
    series: TimeSeries,
    reference_k: float = 0.5,
    decision_h: float = 5.0,
    burn_in: int = 14,
) -> list:
    """Two-sided standardized CUSUM with burn-in calibration.

    Observations are standardized by the mean and population standard
    deviation of the first ``burn_in`` points; the usual one-sided
    recursions accumulate standardized drift beyond ``reference_k`` and
    flag (then reset) when either side exceeds ``decision_h``.
    """
    if decision_h <= 0:
        raise InvalidInputError(f"decision_h must be > 0, got {decision_h}")
    if reference_k < 0:
        raise InvalidInputError(f"reference_k must be >= 0, got {reference_k}")
    n = len(series)
    if n < 10:
        raise InsufficientDataError(f"series has {n} observations, need at least 10")
    burn_in = min(burn_in, n)
    values = series.metric_values()
    dates = series.dates()
    if np.all(values[:burn_in] == values[0]):
        if np.all(values == values[0]):
            return []  # nothing ever deviates; no change points by definition
        raise DegenerateInputError(
            "burn-in window has zero variance; cannot standardize"
        )
    mu = float(values[:burn_in].mean())
    sd = float(values[:burn_in].std())
    z = (values - mu) / sd
    flags = []
    s_hi = s_lo = 0.0
    for i in range(n):
        s_hi = max(0.0, s_hi + z[i] - reference_k)
        s_lo = max(0.0, s_lo - z[i] - reference_k)
        if s_hi > decision_h or s_lo > decision_h:
            flags.append(dates[i])
            s_hi = s_lo = 0.0
    return flags


def rolling_regression(series: TimeSeries, window: int = 7, alpha: float = 0.05) -> list:
    """Dates where a trailing-window slope first turns significantly negative.

    Ordinary least squares of the metric on day offsets over each
    trailing window of ``window`` observations; a flag fires on the day
    a window's slope becomes significantly negative (p < alpha) after a
    window that was not.
    """
    if window < 3:
        raise InvalidInputError(f"window must be >= 3, got {window}")
    if not 0 < alpha < 1:
        raise InvalidInputError(f"alpha must be in (0, 1), got {alpha}")
    n = len(series)
    values = series.metric_values()
    offsets = series.day_offsets()
    dates = series.dates()
    flags = []
    was_significant = False
    for i in range(window - 1, n):
        x = offsets[i - window + 1 : i + 1]
        y = values[i - window + 1 : i + 1]
        xc = x - x.mean()
        sxx = float(xc @ xc)
        slope = float(xc @ (y - y.mean()) / sxx)
        resid = (y - y.mean()) - slope * xc
        ssr = float(resid @ resid)
        se = np.sqrt(ssr / (window - 2) / sxx)
        if se == 0.0:
            p = 1.0 if slope == 0.0 else 0.0
        else:
            p = float(2.0 * stats.t.sf(abs(slope) / se, window - 2))
        significant = p < alpha and slope < 0
        if significant and not was_significant:
            flags.append(dates[i])
        was_significant = significant
    return flags
