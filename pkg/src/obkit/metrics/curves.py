"""Threshold sweeps producing per-image PR curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..raster import BinaryMap, ProbabilityMap, ThresholdConfig, morph_thin, threshold
from .matching import match_boundaries

__all__ = ["MatchConfig", "PrPoint", "pr_curve", "f_measure", "precision_recall"]


@dataclass(frozen=True)
class MatchConfig:
    """Evaluation protocol constants.

    d_max = d_max_fraction * image diagonal; 99 uniform threshold levels
    in (0, 1) by default.
    """

    d_max_fraction: float = 0.0075
    thresholds: int = 99
    method: str = "greedy"

    def __post_init__(self):
        if not self.d_max_fraction > 0:
            raise ValueError("d_max_fraction must be positive")
        if self.thresholds < 1:
            raise ValueError("need at least one threshold level")

    def threshold_grid(self) -> np.ndarray:
        n = self.thresholds
        return np.arange(1, n + 1, dtype=np.float64) / (n + 1)

    def d_max(self, shape: tuple[int, int]) -> float:
        h, w = shape
        return self.d_max_fraction * float(np.hypot(w, h))


@dataclass(frozen=True)
class PrPoint:
    threshold: float
    tp: int
    fp_count: int
    fn_count: int
    precision: float
    recall: float


def precision_recall(tp: int, fp_count: int, fn_count: int) -> tuple[float, float]:
    """Empty-prediction precision and empty-gt recall default to 1."""
    precision = tp / (tp + fp_count) if tp + fp_count else 1.0
    recall = tp / (tp + fn_count) if tp + fn_count else 1.0
    return precision, recall


def f_measure(tp: int, fp_count: int, fn_count: int) -> float:
    p, r = precision_recall(tp, fp_count, fn_count)
    return 2 * p * r / (p + r) if p + r else 0.0


def pr_curve(prob: ProbabilityMap, gt: BinaryMap, cfg: MatchConfig = MatchConfig()) -> list[PrPoint]:
    """One PrPoint per threshold level; prob must already be NMS-thinned."""
    d_max = cfg.d_max(prob.shape)
    points = []
    for t in cfg.threshold_grid():
        binary = threshold(prob, ThresholdConfig(T=float(t), mode="binary"))
        thin = morph_thin(binary)
        tp, fp_count, fn_count = match_boundaries(thin, gt, d_max, method=cfg.method)
        p, r = precision_recall(tp, fp_count, fn_count)
        points.append(PrPoint(threshold=float(t), tp=tp, fp_count=fp_count,
                              fn_count=fn_count, precision=p, recall=r))
    return points
