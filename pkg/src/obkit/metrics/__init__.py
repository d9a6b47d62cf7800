"""The OB evaluation protocol: matching, PR sweeps, ODS/OIS/AP, avgFN/avgFP."""

from .curves import MatchConfig, PrPoint, f_measure, pr_curve, precision_recall
from .matching import match_boundaries, match_offsets
from .report import EvalReport, ImageScore, avg_fn_fp, read_report, summarize, write_report

__all__ = [
    "EvalReport",
    "ImageScore",
    "MatchConfig",
    "PrPoint",
    "avg_fn_fp",
    "f_measure",
    "match_boundaries",
    "match_offsets",
    "pr_curve",
    "precision_recall",
    "read_report",
    "summarize",
    "write_report",
]
