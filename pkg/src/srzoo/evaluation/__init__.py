from .metrics import LossSpec, MetricError, PsnrScore, loss, psnr
from .timing import BenchBusyError, BenchError, BenchReport, environment_metadata, time_model
from .tracks import (
    PSNR_TOL_DB,
    RUNTIME_SLACK,
    EntryRecord,
    RankingResult,
    TrackError,
    TrackVerdict,
    entry_from_dict,
    load_entries,
    load_fixture,
    rank_entries,
    validate_track,
)

__all__ = [
    "LossSpec", "MetricError", "PsnrScore", "loss", "psnr",
    "BenchBusyError", "BenchError", "BenchReport", "environment_metadata", "time_model",
    "PSNR_TOL_DB", "RUNTIME_SLACK", "EntryRecord", "RankingResult", "TrackError",
    "TrackVerdict", "entry_from_dict", "load_entries", "load_fixture",
    "rank_entries", "validate_track",
]
