"""Signature-based creative-fatigue detection toolkit.

Detects change points in advertising performance series by comparing
truncated path signatures of adjacent sliding windows, classifies
per-segment trends, prices the opportunity cost of degraded
performance, and ships a seeded synthetic benchmark with scoring
utilities for method comparison.
"""

__version__ = "0.1.0"

from .detector import (
    ChangePoint,
    ChangePointReport,
    DetectorConfig,
    DistancePoint,
    Segment,
    classify_trend,
    detect,
    distance_series,
    segment_series,
)
from .errors import (
    ConfigurationError,
    CsvFormatError,
    DegenerateInputError,
    InsufficientDataError,
    InvalidInputError,
    PatternSpecError,
    ShapeError,
    SigFatigueError,
)
from .evaluation import (
    EvalMetrics,
    MatchPolicy,
    bootstrap_ci,
    evaluate_corpus,
    grid_search,
    match_detections,
    score,
    sensitivity_report,
)
from .sigcore import (
    TensorSeq,
    chen_concat,
    flatten,
    log_signature,
    path_signature,
    segment_signature,
    sig_distance,
    tensor_exp,
)
from .synth import (
    PATTERN_KINDS,
    GeneratedSeries,
    GroundTruth,
    PatternSpec,
    generate,
    generate_batch,
)
from .wastage import WastageReport, compute_wastage, lost_clicks, select_benchmark
from .windowing import (
    NormalizedPath,
    SeriesPoint,
    TimeSeries,
    normalize_window,
    normalize_window_pair,
    read_series_csv,
    window_pairs,
    write_series_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
