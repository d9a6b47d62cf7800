"""Dataset-level evaluation: ODS, OIS, AP, avgFN/avgFP, report documents.

ODS takes the best fixed threshold over aggregated counts; OIS aggregates
counts at each image's own best threshold; AP interpolates dataset
precision over 101 uniform recall levels (precision at recall r is the
best precision achieved at recall >= r). avgFN/avgFP are per-image
unweighted means of selected-segment pixel shares; raw ratios are stored
and display scaling (1e-2 / 1e-3...) is applied only when printing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import EmptyDatasetError, ParseError
from .curves import PrPoint, f_measure

__all__ = ["ImageScore", "EvalReport", "summarize", "avg_fn_fp", "write_report", "read_report"]

log = logging.getLogger(__name__)

_RECALL_LEVELS = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class ImageScore:
    id: str
    best_f: float
    best_threshold: float
    gt_pixels: int


@dataclass
class EvalReport:
    ods: float
    ois: float
    ap: float
    ods_threshold: float
    avg_fn: Optional[float] = None
    avg_fp: Optional[float] = None
    per_image: list[ImageScore] = field(default_factory=list)

    def __post_init__(self):
        for name in ("ods", "ois", "ap"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} out of range: {v}")


def _aggregate_f(curves: list[list[PrPoint]], picks: list[int]) -> float:
    tp = sum(c[k].tp for c, k in zip(curves, picks))
    fp = sum(c[k].fp_count for c, k in zip(curves, picks))
    fn = sum(c[k].fn_count for c, k in zip(curves, picks))
    return f_measure(tp, fp, fn)


def summarize(curves: list[list[PrPoint]], ids: Optional[list[str]] = None) -> EvalReport:
    """Reduce per-image PR curves (shared threshold grid) to ODS/OIS/AP."""
    if not curves:
        raise EmptyDatasetError("no PR curves to summarize")
    grid = [p.threshold for p in curves[0]]
    for c in curves[1:]:
        if [p.threshold for p in c] != grid:
            raise ValueError("PR curves do not share a threshold grid")
    n_t = len(grid)
    ids = ids if ids is not None else [str(i) for i in range(len(curves))]

    # ODS: best fixed threshold on aggregated counts
    agg_f = [_aggregate_f(curves, [k] * len(curves)) for k in range(n_t)]
    ods_k = int(np.argmax(agg_f))
    ods = agg_f[ods_k]

    # OIS: per image best threshold, then aggregate
    per_best = []
    for c in curves:
        fs = [f_measure(p.tp, p.fp_count, p.fn_count) for p in c]
        per_best.append(int(np.argmax(fs)))
    ois = _aggregate_f(curves, per_best)

    # AP over the aggregated PR curve with standard interpolation
    agg_prec = []
    agg_rec = []
    for k in range(n_t):
        tp = sum(c[k].tp for c in curves)
        fp = sum(c[k].fp_count for c in curves)
        fn = sum(c[k].fn_count for c in curves)
        p = tp / (tp + fp) if tp + fp else 1.0
        r = tp / (tp + fn) if tp + fn else 1.0
        agg_prec.append(p)
        agg_rec.append(r)
    agg_prec = np.asarray(agg_prec)
    agg_rec = np.asarray(agg_rec)
    interp = np.zeros_like(_RECALL_LEVELS)
    for i, r in enumerate(_RECALL_LEVELS):
        ok = agg_rec >= r - 1e-12
        interp[i] = agg_prec[ok].max() if ok.any() else 0.0
    ap = float(interp.mean())

    per_image = [
        ImageScore(
            id=ids[i],
            best_f=f_measure(curves[i][per_best[i]].tp, curves[i][per_best[i]].fp_count,
                             curves[i][per_best[i]].fn_count),
            best_threshold=grid[per_best[i]],
            gt_pixels=curves[i][0].tp + curves[i][0].fn_count,
        )
        for i in range(len(curves))
    ]
    return EvalReport(ods=float(ods), ois=float(ois), ap=ap,
                      ods_threshold=float(grid[ods_k]), per_image=per_image)


def avg_fn_fp(per_image_segments, gts) -> tuple[float, float]:
    """Mean per-image pixel shares of the selected FN/FP segments.

    ``per_image_segments`` is a list of (fn_segments, fp_segments) as
    passed to scribble simulation (post-selection, pre-perturbation);
    ``gts`` the matching GT masks. Images with empty GT are excluded
    from the FN average with a warning.
    """
    fn_ratios = []
    fp_ratios = []
    for (fn_segs, fp_segs), gt in zip(per_image_segments, gts):
        n_on = int(gt.sum())
        n_off = int(gt.size - n_on)
        fn_px = sum(len(s) for s in fn_segs)
        fp_px = sum(len(s) for s in fp_segs)
        if n_on == 0:
            log.warning("image with empty GT excluded from avgFN")
        else:
            fn_ratios.append(fn_px / n_on)
        if n_off == 0:
            log.warning("image with full GT excluded from avgFP")
        else:
            fp_ratios.append(fp_px / n_off)
    avg_fn = float(np.mean(fn_ratios)) if fn_ratios else 0.0
    avg_fp = float(np.mean(fp_ratios)) if fp_ratios else 0.0
    return avg_fn, avg_fp


def write_report(path, report: EvalReport, extra: Optional[dict] = None) -> None:
    lines = ["obkit-eval-report 1"]
    lines.append(f"ods {report.ods:.6f}")
    lines.append(f"ois {report.ois:.6f}")
    lines.append(f"ap {report.ap:.6f}")
    lines.append(f"ods_threshold {report.ods_threshold:.6f}")
    if report.avg_fn is not None:
        lines.append(f"avg_fn {report.avg_fn!r}")
    if report.avg_fp is not None:
        lines.append(f"avg_fp {report.avg_fp!r}")
    for key, val in (extra or {}).items():
        lines.append(f"meta {key} {val}")
    for row in report.per_image:
        lines.append(
            f"image {row.id} best_f {row.best_f:.6f} "
            f"best_t {row.best_threshold:.6f} gt_pixels {row.gt_pixels}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_report(path) -> EvalReport:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("obkit-eval-report"):
        raise ParseError(f"{path}: not an eval report")
    vals: dict[str, float] = {}
    rows: list[ImageScore] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        toks = line.split()
        if toks[0] in ("ods", "ois", "ap", "ods_threshold", "avg_fn", "avg_fp"):
            vals[toks[0]] = float(toks[1])
        elif toks[0] == "image":
            rows.append(ImageScore(id=toks[1], best_f=float(toks[3]),
                                   best_threshold=float(toks[5]), gt_pixels=int(toks[7])))
    return EvalReport(ods=vals["ods"], ois=vals["ois"], ap=vals["ap"],
                      ods_threshold=vals.get("ods_threshold", 0.5),
                      avg_fn=vals.get("avg_fn"), avg_fp=vals.get("avg_fp"),
                      per_image=rows)
