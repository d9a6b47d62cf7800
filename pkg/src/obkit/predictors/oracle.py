"""GT-corrupting oracle predictor, the test instrument for the loop.

The base corruption deletes a random subset of the GT's segments
(expected pixel share = fn_rate) and injects segments from an external
FP source (expected pixel share = fp_rate). On top of that, predict()
makes the oracle scribble-aware, mimicking a perfectly trained model: GT
values reappear inside FN-scribbled regions and injected spurious pixels
vanish inside FP-scribbled regions. Without that reaction no predictor
could recover deleted boundaries and the one-round refinement loop could
never reach F = 1.
"""

from __future__ import annotations

import numpy as np

from ..interaction.scribbles import FnFpMap
from ..raster import BinaryMap, ProbabilityMap, trace_segments

__all__ = ["oracle_noise_predictor", "scribble_aware_oracle"]


def _budget_subset(segments, rate: float, rng: np.random.Generator):
    """Random-order prefix of segments whose pixel share reaches ``rate``.

    The share matches the rate up to one segment of granularity, and the
    extremes are exact: rate 0 picks nothing, rate 1 picks everything.
    Unlike per-segment coin flips this never leaves an image uncorrupted
    at intermediate rates, which the interaction benchmarks rely on.
    """
    segments = list(segments)
    total = sum(len(s) for s in segments)
    budget = rate * total
    picked = []
    taken = 0
    for idx in rng.permutation(len(segments)):
        if not taken < budget:
            break
        seg = segments[int(idx)]
        picked.append(seg)
        taken += len(seg)
    return picked


def oracle_noise_predictor(gt: BinaryMap, fn_rate: float, fp_rate: float,
                           rng: np.random.Generator, fp_source=()) -> ProbabilityMap:
    """Corrupt the GT: drop whole segments, add spurious ones, all at 1.0."""
    if not (0.0 <= fn_rate <= 1.0 and 0.0 <= fp_rate <= 1.0):
        raise ValueError("rates must lie in [0, 1]")
    out = gt.astype(np.float32)
    for seg in _budget_subset(trace_segments(gt), fn_rate, rng):
        out[seg.points[:, 1], seg.points[:, 0]] = 0.0
    h, w = gt.shape
    for seg in _budget_subset(fp_source, fp_rate, rng):
        pts = seg.points
        ok = (pts[:, 0] >= 0) & (pts[:, 0] < w) & (pts[:, 1] >= 0) & (pts[:, 1] < h)
        out[pts[ok, 1], pts[ok, 0]] = 1.0
    return out


def scribble_aware_oracle(gt: BinaryMap, fn_rate: float, fp_rate: float,
                          rng: np.random.Generator, fnfp: FnFpMap,
                          fp_source=()) -> ProbabilityMap:
    """Base corruption plus the perfect-model reaction to the FN-FP map."""
    out = oracle_noise_predictor(gt, fn_rate, fp_rate, rng, fp_source)
    if fnfp.fn.any():
        out[fnfp.fn & gt] = 1.0
    if fnfp.fp.any():
        out[fnfp.fp & ~gt] = 0.0
    return out
