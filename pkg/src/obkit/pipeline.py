"""Machine-simulated interaction and evaluation runs behind the CLI.

Per-image work is fully determined by (global seed, sample id), so runs
are byte-identical no matter how many workers execute them.
"""

from __future__ import annotations

import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import ndimage

from .dataset import BenchmarkManifest
from .errors import MissingFileError
from .interaction import (
    ScribbleConfig,
    SelectionConfig,
    extract_residual_segments,
    refine,
    select_segments,
    simulate_scribbles,
    stage1_fp_source,
)
from .metrics import MatchConfig, avg_fn_fp, f_measure, match_boundaries, pr_curve, summarize
from .predictors import PredictorInput, PredictorSpec, predict
from .raster import (
    BoundarySegment,
    ThresholdConfig,
    load_rgb,
    morph_thin,
    nms_thin,
    read_obfmap,
    threshold,
    trace_segments,
    write_mask,
    write_obfmap,
)

__all__ = ["SimulateConfig", "SimulateResult", "simulate_image", "simulate_run", "evaluate_run"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulateConfig:
    scribble: ScribbleConfig = ScribbleConfig()
    selection: SelectionConfig = SelectionConfig()
    threshold: ThresholdConfig = ThresholdConfig()
    match: MatchConfig = MatchConfig()
    progressive: int = 0  # 0: one round with all scribbles; k: k rounds of one FN + one FP
    seed: int = 0


@dataclass
class SimulateResult:
    id: str
    gt_pixels: int
    fn_pixels: int
    fp_pixels: int
    f_initial: float
    f_refined: float
    rounds: int
    fn_segments: list = field(default_factory=list)
    fp_segments: list = field(default_factory=list)


def _image_seeds(seed: int, sample_id: str) -> tuple[int, int, int]:
    key = zlib.crc32(f"{sample_id}".encode())
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(key,))
    pred, scrib, fpsrc = ss.spawn(3)
    return (
        int(pred.generate_state(1)[0]),
        int(scrib.generate_state(1)[0]),
        int(fpsrc.generate_state(1)[0]),
    )


def synthetic_fp_source(gt, rng: np.random.Generator, min_dist: float,
                        n_strokes: int = 8, length: int = 45,
                        min_length: Optional[int] = None) -> list[BoundarySegment]:
    """Random straight strokes away from the GT, for rgb-less oracle runs.

    Each stroke is contiguous and placed only where the whole walk stays
    at least min_dist from the GT and 3 px from earlier strokes, so the
    returned segments keep their full length instead of fragmenting.
    Strokes shorter than ``min_length`` (default: the full length) are
    rejected and retried elsewhere.
    """
    from .interaction.scribbles import polyline_pixels
    from .raster import dilate_disk

    h, w = gt.shape
    accept = length if min_length is None else min_length
    free = ndimage.distance_transform_edt(~gt) > min_dist
    raster = np.zeros((h, w), dtype=bool)
    placed = 0
    attempts = 0
    while placed < n_strokes and attempts < 40 * n_strokes:
        attempts += 1
        ys, xs = np.nonzero(free)
        if len(xs) == 0:
            break
        k = int(rng.integers(len(xs)))
        x0, y0 = float(xs[k]), float(ys[k])
        ang = rng.random() * 2 * np.pi
        dx, dy = np.cos(ang), np.sin(ang)
        # furthest free extent along the ray, then a Bresenham chain:
        # minimal 8-chains have no elbow pixels, so tracing keeps them whole
        reach = 0
        for step in range(1, length):
            xi = int(round(x0 + step * dx))
            yi = int(round(y0 + step * dy))
            if not (0 <= xi < w and 0 <= yi < h) or not free[yi, xi]:
                break
            reach = step
        end = (round(x0 + reach * dx), round(y0 + reach * dy))
        pts = polyline_pixels(np.array([[x0, y0], end], dtype=np.float64))
        if len(pts) < accept or any(
            not (0 <= px < w and 0 <= py < h) or not free[py, px] for px, py in pts
        ):
            continue
        raster |= dilate_disk(pts, 0, (w, h))
        free &= ~dilate_disk(pts, 3, (w, h))
        placed += 1
    return trace_segments(morph_thin(raster))


def _f_at_threshold(mask, gt, d_max: float) -> float:
    tp, fp, fn = match_boundaries(mask, gt, d_max)
    return f_measure(tp, fp, fn)


def simulate_image(sample_id: str, rgb, gt, spec: PredictorSpec, cfg: SimulateConfig,
                   out_dir: Optional[Path] = None) -> SimulateResult:
    """One image through the interaction loop; optionally writes artifacts."""
    h, w = gt.shape
    canvas = (w, h)
    d_max = cfg.match.d_max(gt.shape)
    pred_seed, scrib_seed, fp_seed = _image_seeds(cfg.seed, sample_id)

    fp_source: list[BoundarySegment] = []
    if spec.kind == "oracle_noise" and spec.fp_rate > 0:
        if rgb is not None:
            fp_source = stage1_fp_source(rgb, gt, d_max)
        else:
            fp_source = synthetic_fp_source(gt, np.random.default_rng(fp_seed), d_max)

    def run_predictor(fnfp_prev: PredictorInput):
        # a fixed per-image seed keeps the oracle corruption identical
        # across rounds, so refinement only ever sees scribble reactions
        return predict(spec, fnfp_prev, gt=gt, fp_source=fp_source,
                       rng=np.random.default_rng(pred_seed))

    binary_cfg = ThresholdConfig(T=cfg.threshold.T, mode="binary")
    p0 = run_predictor(PredictorInput.initial(rgb, gt.shape))
    initial_prob = nms_thin(p0)
    prev = threshold(initial_prob, cfg.threshold)
    if cfg.threshold.mode == "binary":
        prev = prev.astype(np.float32)
    mask = morph_thin(threshold(initial_prob, binary_cfg))
    f_initial = _f_at_threshold(mask, gt, d_max)

    scrib_rng = np.random.default_rng(scrib_seed)
    all_fn_sel: list[BoundarySegment] = []
    all_fp_sel: list[BoundarySegment] = []
    rounds = max(1, cfg.progressive) if cfg.progressive else 1
    refined_prob = initial_prob
    last_fnfp = None
    rounds_run = 0
    for _round in range(rounds):
        fn_raw, fp_raw = extract_residual_segments(mask, gt, d_max)
        sel_cfg = cfg.selection
        if cfg.progressive:
            sel_cfg = SelectionConfig(min_segment_length=cfg.selection.min_segment_length,
                                      max_segments=1)
        fn_sel = select_segments(fn_raw, sel_cfg)
        fp_sel = select_segments(fp_raw, sel_cfg)
        if not fn_sel and not fp_sel:
            break
        rounds_run += 1
        all_fn_sel.extend(fn_sel)
        all_fp_sel.extend(fp_sel)
        fnfp = simulate_scribbles(fn_sel, fp_sel, cfg.scribble, canvas, scrib_rng)
        last_fnfp = fnfp
        candidate = run_predictor(PredictorInput(rgb=rgb, fnfp=fnfp, prev=prev))
        refined = refine(prev, candidate, fnfp, cfg.threshold)
        refined_prob = nms_thin(refined)
        prev = threshold(refined_prob, cfg.threshold)
        if cfg.threshold.mode == "binary":
            prev = prev.astype(np.float32)
        mask = morph_thin(threshold(refined_prob, binary_cfg))

    f_refined = _f_at_threshold(mask, gt, d_max)
    result = SimulateResult(
        id=sample_id,
        gt_pixels=int(gt.sum()),
        fn_pixels=sum(len(s) for s in all_fn_sel),
        fp_pixels=sum(len(s) for s in all_fp_sel),
        f_initial=f_initial,
        f_refined=f_refined,
        rounds=rounds_run,
        fn_segments=all_fn_sel,
        fp_segments=all_fp_sel,
    )

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_obfmap(out_dir / f"{sample_id}_initial.obfmap", initial_prob)
        write_obfmap(out_dir / f"{sample_id}_refined.obfmap", refined_prob)
        fnfp_out = last_fnfp
        if fnfp_out is None:
            from .interaction import FnFpMap

            fnfp_out = FnFpMap.zeros(gt.shape)
        write_mask(out_dir / f"{sample_id}_fn.png", fnfp_out.fn)
        write_mask(out_dir / f"{sample_id}_fp.png", fnfp_out.fp)
        write_mask(out_dir / f"{sample_id}_refined_mask.png", mask)
    return result


def _simulate_worker(args):
    manifest_path, sample_id, spec, cfg, out_dir = args
    from .dataset import load_benchmark

    manifest = load_benchmark(manifest_path)
    sample = manifest.get(sample_id)
    gt = manifest.load_gt(sample)
    rgb = load_rgb(manifest.root / sample.rgb) if sample.rgb else None
    return simulate_image(sample_id, rgb, gt, spec, cfg, out_dir)


def simulate_run(manifest: BenchmarkManifest, manifest_path, spec: PredictorSpec,
                 cfg: SimulateConfig, out_dir, jobs: int = 1) -> list[SimulateResult]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ids = manifest.sample_ids()
    tasks = [(str(manifest_path), sid, spec, cfg, out_dir) for sid in ids]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_simulate_worker, tasks))
    else:
        results = [_simulate_worker(t) for t in tasks]

    gts = [manifest.load_gt(manifest.get(r.id)) for r in results]
    a_fn, a_fp = avg_fn_fp([(r.fn_segments, r.fp_segments) for r in results], gts)
    lines = ["obkit-simulate-summary 1", f"seed {cfg.seed}"]
    for r in results:
        lines.append(
            f"image {r.id} gt_px {r.gt_pixels} fn_px {r.fn_pixels} fp_px {r.fp_pixels} "
            f"f_initial {r.f_initial:.6f} f_refined {r.f_refined:.6f} rounds {r.rounds}"
        )
    lines.append(f"avg_fn {a_fn!r}")
    lines.append(f"avg_fp {a_fp!r}")
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")
    return results


def _evaluate_worker(args):
    pred_path, gt_path, cfg = args
    from .raster import read_mask

    # predictions are the NMS-produced probability maps; pr_curve re-thins
    # each thresholded level, so no extra suppression happens here
    prob = read_obfmap(pred_path)
    gt = morph_thin(read_mask(gt_path))
    return pr_curve(prob, gt, cfg)


def evaluate_run(pred_dir, gt_dir, cfg: MatchConfig, out_path, jobs: int = 1):
    pred_dir = Path(pred_dir)
    gt_dir = Path(gt_dir)
    gt_files = sorted(p for p in gt_dir.iterdir() if p.suffix.lower() == ".png")
    if not gt_files:
        raise MissingFileError(f"no gt masks (*.png) in {gt_dir}")
    pairs = []
    for gt_path in gt_files:
        pred_path = pred_dir / f"{gt_path.stem}.obfmap"
        if not pred_path.is_file():
            raise MissingFileError(f"no prediction {pred_path} for gt {gt_path.name}")
        pairs.append((pred_path, gt_path, cfg))
    if jobs > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            curves = list(pool.map(_evaluate_worker, pairs))
    else:
        curves = [_evaluate_worker(p) for p in pairs]
    report = summarize(curves, ids=[g.stem for g in gt_files])
    from .metrics import write_report

    write_report(out_path, report, extra={
        "thresholds": cfg.thresholds, "d_max_fraction": cfg.d_max_fraction,
    })
    return report
