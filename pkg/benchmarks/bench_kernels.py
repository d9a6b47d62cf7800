"""Benchmark the numba kernels against their pure-numpy fallbacks.

Each hot kernel runs on identical inputs through both code paths (the
paths are toggled via the per-module NUMBA_ENABLED switch, the same one
OBKIT_NUMBA=0 sets at import time). Results are checked for equality
while timing, so this doubles as a coarse consistency sweep.

Usage: python benchmarks/bench_kernels.py [--size 512] [--repeat 5]
"""

import argparse
import time

import numpy as np

import obkit.metrics.matching as matching_mod
import obkit.obgen.generate as generate_mod
import obkit.raster.dilation as dilation_mod
import obkit.raster.nms as nms_mod
import obkit.raster.thinning as thinning_mod
from obkit.geometry import build_bvh, cast_ray_brute, cast_rays, make_mesh, render_gbuffer
from obkit.metrics import match_boundaries
from obkit.obgen import GenConfig, mark_boundaries
from obkit.raster import dilate_disk, morph_thin, nms_thin
from obkit.geometry.camera import PinholeCamera


def timed(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def with_flag(mod, value, fn, repeat):
    old = mod.NUMBA_ENABLED
    mod.NUMBA_ENABLED = value
    try:
        return timed(fn, repeat)
    finally:
        mod.NUMBA_ENABLED = old


def row(name, t_numba, t_numpy, equal):
    speedup = t_numpy / t_numba if t_numba > 0 else float("inf")
    mark = "ok" if equal else "MISMATCH"
    print(f"{name:<22} numba {t_numba * 1e3:9.2f} ms   numpy {t_numpy * 1e3:9.2f} ms "
          f"  x{speedup:7.1f}   {mark}")


def quad_stack_mesh(n=6):
    verts, faces, inst = [], [], []
    for i in range(n):
        z = 1.5 + 0.7 * i
        h = 0.3 + 0.1 * i
        base = len(verts)
        verts += [[-h, -h, z], [h, -h, z], [h, h, z], [-h, h, z]]
        faces.append([base, base + 1, base + 2, base + 3])
        inst.append(i)
    return make_mesh(np.array(verts), faces, inst)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    n = args.size
    rng = np.random.default_rng(0)

    print(f"kernel benchmarks at {n}x{n} (best of {args.repeat})\n")

    prob = (rng.random((n, n)) ** 3).astype(np.float32)
    nms_thin(prob[:32, :32])  # jit warm-up
    t_nb, out_nb = with_flag(nms_mod, True, lambda: nms_thin(prob), args.repeat)
    t_np, out_np = with_flag(nms_mod, False, lambda: nms_thin(prob), args.repeat)
    row("nms_thin", t_nb, t_np, np.array_equal(out_nb, out_np))

    blob = rng.random((n, n)) < 0.25
    morph_thin(blob[:32, :32])
    t_nb, out_nb = with_flag(thinning_mod, True, lambda: morph_thin(blob), args.repeat)
    t_np, out_np = with_flag(thinning_mod, False, lambda: morph_thin(blob), args.repeat)
    row("morph_thin", t_nb, t_np, np.array_equal(out_nb, out_np))

    pts = [(int(x), int(y)) for x, y in rng.integers(0, n, (800, 2))]
    dilate_disk(pts[:5], 12, (n, n))
    t_nb, out_nb = with_flag(dilation_mod, True, lambda: dilate_disk(pts, 12, (n, n)), args.repeat)
    t_np, out_np = with_flag(dilation_mod, False, lambda: dilate_disk(pts, 12, (n, n)), args.repeat)
    row("dilate_disk r=12", t_nb, t_np, np.array_equal(out_nb, out_np))

    pred = morph_thin(rng.random((n, n)) < 0.02)
    gt = morph_thin(rng.random((n, n)) < 0.02)
    match_boundaries(pred[:32, :32], gt[:32, :32], 3.0)
    t_nb, out_nb = with_flag(matching_mod, True, lambda: match_boundaries(pred, gt, 5.0), args.repeat)
    t_np, out_np = with_flag(matching_mod, False, lambda: match_boundaries(pred, gt, 5.0), args.repeat)
    row("match_boundaries", t_nb, t_np, out_nb == out_np)

    mesh = quad_stack_mesh()
    accel = build_bvh(mesh)
    cam = PinholeCamera(fx=n, fy=n, cx=n / 2, cy=n / 2, width=n, height=n)
    origins = np.tile(cam.center, (n * 16, 1))
    dirs = rng.normal(size=(n * 16, 3))
    dirs[:, 2] = np.abs(dirs[:, 2]) + 0.5
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    cast_rays(mesh, accel, origins[:8], dirs[:8])

    def brute_all():
        return np.array([cast_ray_brute(mesh, origins[i], dirs[i], accel.eps)[1]
                         for i in range(len(dirs))])

    t_nb, tri_nb = timed(lambda: cast_rays(mesh, accel, origins, dirs)[1], args.repeat)
    t_np, tri_np = timed(brute_all, 1)
    row(f"cast {len(dirs)} rays", t_nb, t_np, np.array_equal(tri_nb, tri_np))

    gb = render_gbuffer(mesh, cam, accel=accel)
    cfg = GenConfig()
    mark_boundaries(gb, mesh, cam, cfg)
    t_nb, out_nb = with_flag(generate_mod, True, lambda: mark_boundaries(gb, mesh, cam, cfg), args.repeat)
    t_np, out_np = with_flag(generate_mod, False, lambda: mark_boundaries(gb, mesh, cam, cfg), args.repeat)
    row("ob pair sweep", t_nb, t_np, np.array_equal(out_nb, out_np))


if __name__ == "__main__":
    main()
