"""Benchmark export: per-sample rasters plus a checksummed manifest.

Outputs are reproducible: fixed file ordering, no timestamps, so
re-running on identical inputs is byte-identical. Label images encode
0 = background, 128 = self-occlusion, 255 = inter-object.
"""

from __future__ import annotations

import shutil
from pathlib import Path

import numpy as np
from PIL import Image

from ..dataset.manifest import BenchmarkManifest, ManifestSample, load_benchmark, sha256_file, write_manifest
from ..errors import IOErrorWithPath
from ..geometry.render import GBuffer
from ..raster import write_mask, write_obfmap
from .generate import ObMap
from .occlusion import LABEL_INTER, LABEL_SELF

__all__ = ["export_benchmark", "LABEL_PIXEL_VALUES"]

LABEL_PIXEL_VALUES = {0: 0, LABEL_SELF: 128, LABEL_INTER: 255}


def _label_image(labels: np.ndarray) -> Image.Image:
    out = np.zeros(labels.shape, dtype=np.uint8)
    out[labels == LABEL_SELF] = LABEL_PIXEL_VALUES[LABEL_SELF]
    out[labels == LABEL_INTER] = LABEL_PIXEL_VALUES[LABEL_INTER]
    return Image.fromarray(out, mode="L")


def export_benchmark(samples, out_dir, name: str = "obkit-benchmark") -> BenchmarkManifest:
    """Write (rgb_path?, ObMap, GBuffer) samples into a benchmark directory.

    ``samples`` is a list of (sample_id, rgb_path_or_None, ObMap, GBuffer).
    Colliding sample ids get a numeric suffix. Returns the loaded manifest.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("export needs at least one sample")
    out_dir = Path(out_dir)
    try:
        for sub in ("gt", "labels", "depth", "images"):
            (out_dir / sub).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IOErrorWithPath(out_dir, f"cannot create benchmark directory ({e})")

    used: set[str] = set()
    entries: list[ManifestSample] = []
    checksums: dict[str, str] = {}
    for sample_id, rgb_path, ob, gb in samples:
        sid = str(sample_id)
        if sid in used:
            k = 2
            while f"{sid}_{k}" in used:
                k += 1
            sid = f"{sid}_{k}"
        used.add(sid)
        if not isinstance(ob, ObMap) or not isinstance(gb, GBuffer):
            raise TypeError("samples must carry (id, rgb_path, ObMap, GBuffer)")

        gt_rel = f"gt/{sid}.png"
        labels_rel = f"labels/{sid}.png"
        depth_rel = f"depth/{sid}.obfmap"
        try:
            write_mask(out_dir / gt_rel, ob.boundary)
            _label_image(ob.labels).save(out_dir / labels_rel, format="PNG")
            write_obfmap(out_dir / depth_rel, gb.depth.astype(np.float32), validate=False)
        except OSError as e:
            raise IOErrorWithPath(out_dir / gt_rel, f"cannot write sample rasters ({e})")
        rgb_rel = None
        if rgb_path is not None:
            rgb_rel = f"images/{sid}{Path(rgb_path).suffix or '.png'}"
            try:
                shutil.copyfile(rgb_path, out_dir / rgb_rel)
            except OSError as e:
                raise IOErrorWithPath(rgb_path, f"cannot copy rgb ({e})")
        entries.append(ManifestSample(id=sid, gt=gt_rel, rgb=rgb_rel,
                                      depth=depth_rel, labels=labels_rel))
        for rel in (gt_rel, labels_rel, depth_rel, rgb_rel):
            if rel is not None:
                checksums[rel] = sha256_file(out_dir / rel)

    manifest_path = out_dir / "manifest"
    write_manifest(manifest_path, name, entries, checksums)
    return load_benchmark(manifest_path)
