"""Benchmark manifests and external image/GT ingestion.

A manifest is a line-oriented text document, diff-able and durable:

    obkit-manifest 1
    name <benchmark name>
    sample <id> gt=<relpath> [rgb=<relpath>] [depth=<relpath>] [labels=<relpath>]
    file <relpath> <sha256 hex>

Paths are relative to the manifest's directory. The conventional layout
is ``<root>/images/``, ``<root>/gt/``, ``<root>/depth/`` beside
``<root>/manifest``.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ChecksumMismatchError, MissingFileError, NoPairsError, ParseError
from ..raster import BinaryMap, has_2x2_block, morph_thin, read_mask, read_obfmap

__all__ = [
    "ManifestSample",
    "BenchmarkManifest",
    "sha256_file",
    "write_manifest",
    "load_benchmark",
    "import_pairs",
]

log = logging.getLogger(__name__)

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


@dataclass(frozen=True)
class ManifestSample:
    id: str
    gt: str
    rgb: Optional[str] = None
    depth: Optional[str] = None
    labels: Optional[str] = None

    def paths(self):
        for p in (self.gt, self.rgb, self.depth, self.labels):
            if p is not None:
                yield p


@dataclass
class BenchmarkManifest:
    name: str
    root: Path
    samples: list[ManifestSample]
    checksums: dict[str, str]
    thinning_warnings: int = 0
    _gt_cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def sample_ids(self) -> list[str]:
        return [s.id for s in self.samples]

    def get(self, sample_id: str) -> ManifestSample:
        for s in self.samples:
            if s.id == sample_id:
                return s
        raise KeyError(sample_id)

    def load_gt(self, sample: ManifestSample) -> BinaryMap:
        """GT mask, validated {0,255} and thinned (with a warning) if thick."""
        if sample.id not in self._gt_cache:
            mask = read_mask(self.root / sample.gt)
            if has_2x2_block(mask):
                log.warning("gt mask %s is not thin; thinning on load", sample.gt)
                self.thinning_warnings += 1
                mask = morph_thin(mask)
            self._gt_cache[sample.id] = mask
        return self._gt_cache[sample.id]

    def load_depth(self, sample: ManifestSample):
        if sample.depth is None:
            return None
        return read_obfmap(self.root / sample.depth, validate=False)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, name: str, samples: list[ManifestSample],
                   checksums: dict[str, str]) -> None:
    path = Path(path)
    lines = ["obkit-manifest 1", f"name {name}"]
    for s in samples:
        parts = [f"sample {s.id}", f"gt={s.gt}"]
        for key in ("rgb", "depth", "labels"):
            val = getattr(s, key)
            if val is not None:
                parts.append(f"{key}={val}")
        lines.append(" ".join(parts))
    for rel in sorted(checksums):
        lines.append(f"file {rel} {checksums[rel]}")
    path.write_text("\n".join(lines) + "\n")


def load_benchmark(path) -> BenchmarkManifest:
    """Parse and validate a manifest: ids unique, files exist, checksums match."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read manifest {path}: {e}") from e
    lines = text.splitlines()
    if not lines or not lines[0].startswith("obkit-manifest"):
        raise ParseError(f"{path}: missing obkit-manifest header")
    version = lines[0].split()[-1]
    if version != "1":
        raise ParseError(f"{path}: unsupported manifest version {version!r}")
    name = ""
    samples: list[ManifestSample] = []
    checksums: dict[str, str] = {}
    for lineno, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tag, _, rest = line.partition(" ")
        if tag == "name":
            name = rest.strip()
        elif tag == "sample":
            toks = rest.split()
            if not toks:
                raise ParseError(f"{path}:{lineno}: sample line without id")
            sid = toks[0]
            fields: dict[str, str] = {}
            for tok in toks[1:]:
                key, eq, val = tok.partition("=")
                if not eq or key not in ("gt", "rgb", "depth", "labels"):
                    raise ParseError(f"{path}:{lineno}: bad sample field {tok!r}")
                fields[key] = val
            if "gt" not in fields:
                raise ParseError(f"{path}:{lineno}: sample {sid} has no gt path")
            samples.append(ManifestSample(id=sid, **fields))
        elif tag == "file":
            toks = rest.split()
            if len(toks) != 2:
                raise ParseError(f"{path}:{lineno}: file line needs path and sha256")
            checksums[toks[0]] = toks[1]
        else:
            raise ParseError(f"{path}:{lineno}: unknown record {tag!r}")

    ids = [s.id for s in samples]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ParseError(f"{path}: duplicate sample ids: {', '.join(dupes)}")
    root = path.parent
    for s in samples:
        for rel in s.paths():
            full = root / rel
            if not full.is_file():
                raise MissingFileError(f"{path}: sample {s.id} references missing file {rel}")
    for rel, digest in checksums.items():
        full = root / rel
        if not full.is_file():
            raise MissingFileError(f"{path}: checksum references missing file {rel}")
        actual = sha256_file(full)
        if actual != digest:
            raise ChecksumMismatchError(f"{path}: {rel}: expected {digest}, got {actual}")
    return BenchmarkManifest(name=name, root=root, samples=samples, checksums=checksums)


def import_pairs(images_dir, masks_dir, out_manifest, name: str = "imported") -> BenchmarkManifest:
    """Pair images and GT masks by filename stem and write a manifest."""
    images_dir = Path(images_dir)
    masks_dir = Path(masks_dir)
    out_manifest = Path(out_manifest)
    root = out_manifest.parent
    images = {p.stem: p for p in sorted(images_dir.iterdir())
              if p.suffix.lower() in _IMAGE_SUFFIXES} if images_dir.is_dir() else {}
    masks = {p.stem: p for p in sorted(masks_dir.iterdir())
             if p.suffix.lower() in _IMAGE_SUFFIXES} if masks_dir.is_dir() else {}
    matched = sorted(set(images) & set(masks))
    for stem in sorted(set(images) ^ set(masks)):
        side = "mask" if stem in images else "image"
        log.warning("unmatched %s for stem %r", side, stem)
    if not matched:
        raise NoPairsError(f"no matching image/mask stems between {images_dir} and {masks_dir}")
    samples = []
    checksums = {}
    for stem in matched:
        rgb_rel = os.path.relpath(images[stem], root)
        gt_rel = os.path.relpath(masks[stem], root)
        samples.append(ManifestSample(id=stem, gt=gt_rel, rgb=rgb_rel))
        checksums[gt_rel] = sha256_file(masks[stem])
        checksums[rgb_rel] = sha256_file(images[stem])
    write_manifest(out_manifest, name, samples, checksums)
    return load_benchmark(out_manifest)
