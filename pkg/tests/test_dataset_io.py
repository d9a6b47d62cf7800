import numpy as np
import pytest

from obkit.dataset import ManifestSample, import_pairs, load_benchmark, sha256_file, write_manifest
from obkit.errors import ChecksumMismatchError, MissingFileError, NoPairsError, ParseError
from obkit.raster import has_2x2_block, write_mask, write_rgb

from conftest import random_thin_map


def make_benchmark(root, n=2, rng=None):
    rng = rng or np.random.default_rng(0)
    (root / "gt").mkdir(parents=True)
    samples, checks = [], {}
    for i in range(n):
        rel = f"gt/{i:03d}.png"
        write_mask(root / rel, random_thin_map(rng))
        samples.append(ManifestSample(id=f"{i:03d}", gt=rel))
        checks[rel] = sha256_file(root / rel)
    write_manifest(root / "manifest", "demo", samples, checks)
    return root / "manifest"


def test_manifest_roundtrip(tmp_path):
    path = make_benchmark(tmp_path, n=2)
    m = load_benchmark(path)
    assert m.name == "demo"
    assert m.sample_ids() == ["000", "001"]
    gt = m.load_gt(m.get("000"))
    assert gt.dtype == np.bool_


def test_manifest_missing_file(tmp_path):
    path = make_benchmark(tmp_path)
    (tmp_path / "gt" / "000.png").unlink()
    with pytest.raises(MissingFileError, match="000"):
        load_benchmark(path)


def test_manifest_checksum_mismatch(tmp_path):
    path = make_benchmark(tmp_path)
    write_mask(tmp_path / "gt" / "000.png", np.zeros((8, 8), dtype=bool))
    with pytest.raises(ChecksumMismatchError):
        load_benchmark(path)


def test_manifest_duplicate_ids_rejected(tmp_path):
    (tmp_path / "gt").mkdir()
    write_mask(tmp_path / "gt" / "a.png", np.zeros((4, 4), dtype=bool))
    samples = [ManifestSample(id="a", gt="gt/a.png"), ManifestSample(id="a", gt="gt/a.png")]
    write_manifest(tmp_path / "manifest", "x", samples, {})
    with pytest.raises(ParseError, match="duplicate"):
        load_benchmark(tmp_path / "manifest")


def test_manifest_bad_header(tmp_path):
    p = tmp_path / "manifest"
    p.write_text("something else\n")
    with pytest.raises(ParseError):
        load_benchmark(p)


def test_thick_gt_thinned_on_load(tmp_path):
    (tmp_path / "gt").mkdir()
    thick = np.zeros((16, 16), dtype=bool)
    thick[4:8, 4:12] = True
    rel = "gt/fat.png"
    write_mask(tmp_path / rel, thick)
    write_manifest(tmp_path / "manifest", "x",
                   [ManifestSample(id="fat", gt=rel)], {rel: sha256_file(tmp_path / rel)})
    m = load_benchmark(tmp_path / "manifest")
    gt = m.load_gt(m.get("fat"))
    assert not has_2x2_block(gt)
    assert m.thinning_warnings == 1


def test_import_pairs(tmp_path, rng):
    (tmp_path / "images").mkdir()
    (tmp_path / "masks").mkdir()
    for i in range(3):
        write_rgb(tmp_path / "images" / f"s{i}.png",
                  (rng.random((8, 8, 3)) * 255).astype(np.uint8))
        write_mask(tmp_path / "masks" / f"s{i}.png", random_thin_map(rng, shape=(8, 8)))
    write_rgb(tmp_path / "images" / "orphan.png", np.zeros((8, 8, 3), dtype=np.uint8))
    m = import_pairs(tmp_path / "images", tmp_path / "masks", tmp_path / "manifest")
    assert m.sample_ids() == ["s0", "s1", "s2"]
    assert all(s.rgb for s in m.samples)


def test_import_pairs_empty(tmp_path):
    (tmp_path / "images").mkdir()
    (tmp_path / "masks").mkdir()
    with pytest.raises(NoPairsError):
        import_pairs(tmp_path / "images", tmp_path / "masks", tmp_path / "manifest")
