"""obkit command line: generate, evaluate, simulate, refine, serve.

Defaults mirror the canonical operating point (disk radius 12, minimum
segment length 30, threshold 0.7, d_max fraction 0.0075, 99 threshold
levels), so bare invocations reproduce the standard configuration.

Exit codes: 0 success, 1 input error (single-line diagnostic naming the
offending flag or file), 2 internal error. OBKIT_LOG overrides
--log-level.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ObkitError
from .interaction import ScribbleConfig, SelectionConfig, parse_scribble_document, rasterize_strokes, refine
from .metrics import MatchConfig
from .obgen import GenConfig, export_benchmark, generate_ob
from .predictors import PredictorInput, parse_predictor_spec, predict
from .raster import ThresholdConfig, load_rgb, nms_thin, read_obfmap, threshold, write_mask, write_obfmap
from .raster import morph_thin

__all__ = ["main", "build_parser"]

log = logging.getLogger("obkit")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # input errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(self._obkit_exit(message))

    @staticmethod
    def _obkit_exit(message) -> int:
        print(f"obkit: error: {message}", file=sys.stderr)
        return 1


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="global RNG seed")
    p.add_argument("--jobs", type=int, default=1, help="worker parallelism (>= 1)")
    p.add_argument("--log-level", default="warning",
                   choices=["debug", "info", "warning", "error"])


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="obkit", description=__doc__.splitlines()[0])
    root.add_argument("--version", action="version", version=f"obkit {__version__}")
    sub = root.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="render scenes and derive exact OB ground truth")
    _common_flags(g)
    g.add_argument("--scene", required=True,
                   help="scene description file, or a directory of *.scene files")
    g.add_argument("--out", required=True, help="output benchmark directory")
    g.add_argument("--supersample", type=int, choices=[1, 2], default=None)
    g.add_argument("--gap-factor", type=float, default=3.0)
    g.add_argument("--walk-limit", type=int, default=8)
    g.add_argument("--contact-tolerance", type=float, default=0.5)

    e = sub.add_parser("evaluate", help="score predictions against GT (ODS/OIS/AP)")
    _common_flags(e)
    e.add_argument("--pred", required=True, help="directory of <id>.obfmap predictions")
    e.add_argument("--gt", required=True, help="directory of <id>.png GT masks")
    e.add_argument("--max-dist", type=float, default=0.0075,
                   help="matching tolerance as a fraction of the image diagonal")
    e.add_argument("--thresholds", type=int, default=99)
    e.add_argument("--exact", action="store_true", help="use the exact matching solver")
    e.add_argument("--out", required=True, help="report file path")

    s = sub.add_parser("simulate", help="machine-simulated scribble interaction")
    _common_flags(s)
    s.add_argument("--images", default=None, help="directory of RGB images (optional)")
    s.add_argument("--gt", required=True, help="directory of <id>.png GT masks")
    s.add_argument("--predictor", required=True,
                   help="gradient | oracle:<gt>,<fn_rate>,<fp_rate> | extern:<command>")
    s.add_argument("--radius", type=int, default=12, help="scribble disk radius")
    s.add_argument("--min-seg-len", type=int, default=30)
    s.add_argument("--max-segs", type=int, default=None)
    s.add_argument("--progressive", type=int, default=0, metavar="K",
                   help="K rounds of at most one FN and one FP scribble")
    s.add_argument("--perturb", type=int, default=3, help="max position perturbation (px)")
    s.add_argument("--length-frac", type=float, default=0.2)
    s.add_argument("--threshold", type=float, default=0.7)
    s.add_argument("--mode", choices=["binary", "non-binary"], default="non-binary",
                   help="how the previous output is derived")
    s.add_argument("--max-dist", type=float, default=0.0075)
    s.add_argument("--out", required=True)

    r = sub.add_parser("refine", help="apply a scribble document to a probability map")
    _common_flags(r)
    r.add_argument("--prev", required=True, help="previous output (OBFMAP01)")
    r.add_argument("--scribbles", required=True, help="scribble JSON document")
    r.add_argument("--image", default=None, help="RGB image for the predictor")
    r.add_argument("--predictor", default=None,
                   help="candidate source; defaults to the previous output itself")
    r.add_argument("--threshold", type=float, default=0.7)
    r.add_argument("--mode", choices=["binary", "non-binary"], default="binary")
    r.add_argument("--out", required=True, help="output directory")

    v = sub.add_parser("serve", help="run the annotation HTTP service")
    _common_flags(v)
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8008)
    v.add_argument("--session-dir", required=True)
    v.add_argument("--predictor", default="gradient")
    v.add_argument("--ui", default=None,
                   help="frontend directory to serve at /app (optional)")

    return root


def _setup_logging(level: str):
    level = os.environ.get("OBKIT_LOG", level)
    logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _cmd_generate(args) -> int:
    scene_arg = Path(args.scene)
    if not scene_arg.exists():
        raise ObkitError(f"--scene path does not exist: {scene_arg}")
    scene_files = sorted(scene_arg.glob("*.scene")) if scene_arg.is_dir() else [scene_arg]
    if not scene_files:
        raise ObkitError(f"--scene directory has no *.scene files: {scene_arg}")
    from .geometry import load_scene

    samples = []
    for path in scene_files:
        mesh, cam, desc = load_scene(path)
        supersample = args.supersample if args.supersample is not None else desc.supersample
        cfg = GenConfig(gap_factor=args.gap_factor, adjacency_walk_limit=args.walk_limit,
                        contact_tolerance=args.contact_tolerance, supersample=supersample)
        ob, gb = generate_ob(mesh, cam, cfg)
        samples.append((path.stem, None, ob, gb))
        log.info("generated %s: %d boundary px", path.stem, int(ob.boundary.sum()))
    manifest = export_benchmark(samples, args.out)
    print(f"wrote {len(manifest.samples)} samples to {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    from .pipeline import evaluate_run

    cfg = MatchConfig(d_max_fraction=args.max_dist, thresholds=args.thresholds,
                      method="exact" if args.exact else "greedy")
    report = evaluate_run(args.pred, args.gt, cfg, args.out, jobs=args.jobs)
    print(f"ods {report.ods:.4f} ois {report.ois:.4f} ap {report.ap:.4f}")
    if report.avg_fn is not None:
        print(f"avgFN(x1e-2) {100 * report.avg_fn:.2f} avgFP(x1e-3) {1000 * report.avg_fp:.3f}")
    return 0


def _cmd_simulate(args) -> int:
    from .dataset import import_pairs, load_benchmark
    from .pipeline import SimulateConfig, simulate_run

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "inputs.manifest"
    if args.images:
        import_pairs(args.images, args.gt, manifest_path, name="simulate-inputs")
    else:
        _manifest_from_gt_dir(Path(args.gt), manifest_path)
    manifest = load_benchmark(manifest_path)
    spec = parse_predictor_spec(args.predictor)
    cfg = SimulateConfig(
        scribble=ScribbleConfig(disk_radius=args.radius,
                                max_position_perturbation=args.perturb,
                                length_perturbation_fraction=args.length_frac),
        selection=SelectionConfig(min_segment_length=args.min_seg_len,
                                  max_segments=args.max_segs),
        threshold=ThresholdConfig(T=args.threshold, mode=args.mode),
        match=MatchConfig(d_max_fraction=args.max_dist),
        progressive=args.progressive,
        seed=args.seed,
    )
    results = simulate_run(manifest, manifest_path, spec, cfg, out_dir, jobs=args.jobs)
    mean_gain = float(np.mean([r.f_refined - r.f_initial for r in results])) if results else 0.0
    print(f"simulated {len(results)} images; mean F gain {mean_gain:+.4f}")
    return 0


def _manifest_from_gt_dir(gt_dir: Path, manifest_path: Path):
    from .dataset import ManifestSample, sha256_file, write_manifest
    import os as _os

    gt_files = sorted(p for p in gt_dir.iterdir() if p.suffix.lower() == ".png")
    if not gt_files:
        raise ObkitError(f"--gt directory has no *.png masks: {gt_dir}")
    samples, checks = [], {}
    for p in gt_files:
        rel = _os.path.relpath(p, manifest_path.parent)
        samples.append(ManifestSample(id=p.stem, gt=rel))
        checks[rel] = sha256_file(p)
    write_manifest(manifest_path, "simulate-inputs", samples, checks)


def _cmd_refine(args) -> int:
    prev = read_obfmap(args.prev)
    strokes = parse_scribble_document(Path(args.scribbles).read_text())
    h, w = prev.shape
    fnfp = rasterize_strokes(strokes, (w, h))
    rgb = load_rgb(args.image) if args.image else None
    if args.predictor:
        spec = parse_predictor_spec(args.predictor)
        candidate = predict(spec, PredictorInput(rgb=rgb, fnfp=fnfp, prev=prev),
                            rng=np.random.default_rng(args.seed))
    else:
        candidate = prev
    cfg = ThresholdConfig(T=args.threshold, mode=args.mode)
    refined = refine(prev, candidate, fnfp, cfg)
    thin = nms_thin(refined)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_obfmap(out_dir / "refined.obfmap", thin)
    write_mask(out_dir / "refined_mask.png",
               morph_thin(threshold(thin, ThresholdConfig(T=args.threshold, mode="binary"))))
    print(f"wrote {out_dir / 'refined.obfmap'}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(session_dir=args.session_dir,
                     default_predictor=args.predictor, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "evaluate": _cmd_evaluate,
    "simulate": _cmd_simulate,
    "refine": _cmd_refine,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.log_level)
    if args.jobs < 1:
        print("obkit: error: --jobs must be >= 1", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except ObkitError as e:
        print(f"obkit: error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"obkit: error: missing file: {e.filename or e}", file=sys.stderr)
        return 1
    except Exception as e:  # internal error contract
        log.exception("internal error")
        print(f"obkit: internal error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
