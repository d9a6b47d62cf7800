import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from obkit.errors import NotThinError, ParseError
from obkit.raster import (
    BoundarySegment,
    ThresholdConfig,
    dilate_disk,
    disk_offsets,
    has_2x2_block,
    mask_png_bytes,
    morph_thin,
    nms_thin,
    obfmap_bytes,
    obfmap_from_bytes,
    read_mask,
    read_obfmap,
    segments_to_map,
    threshold,
    trace_segments,
    write_mask,
    write_obfmap,
)
from obkit.raster.nms import gradient_xy

from conftest import random_thin_map


# ---------------------------------------------------------------- oracles


def nms_oracle(p):
    """Naive per-pixel reference: gradient direction + bilinear compare."""
    p64 = np.asarray(p, dtype=np.float64)
    gx, gy = gradient_xy(p64)
    h, w = p64.shape

    def sample(xf, yf):
        x0, y0 = int(np.floor(xf)), int(np.floor(yf))
        fx, fy = xf - x0, yf - y0
        total = 0.0
        for dy, dx, wgt in (
            (0, 0, (1 - fx) * (1 - fy)),
            (0, 1, fx * (1 - fy)),
            (1, 0, (1 - fx) * fy),
            (1, 1, fx * fy),
        ):
            xi, yi = x0 + dx, y0 + dy
            if 0 <= xi < w and 0 <= yi < h:
                total += p64[yi, xi] * wgt
        return total

    out = np.zeros_like(p64, dtype=np.float32)
    for y in range(h):
        for x in range(w):
            v = p64[y, x]
            if v <= 0:
                continue
            n = np.hypot(gx[y, x], gy[y, x])
            if n == 0:  # orientation undefined: keep
                out[y, x] = np.float32(p[y, x])
                continue
            ux, uy = gx[y, x] / n, gy[y, x] / n
            if v >= sample(x + ux, y + uy) and v >= sample(x - ux, y - uy):
                out[y, x] = np.float32(p[y, x])
    return out


def dilate_oracle(points, r, canvas):
    w, h = canvas
    out = np.zeros((h, w), dtype=bool)
    pts = list(points)
    for y in range(h):
        for x in range(w):
            for px, py in pts:
                if (x - px) ** 2 + (y - py) ** 2 <= r * r:
                    out[y, x] = True
                    break
    return out


# ---------------------------------------------------------------- nms


def test_nms_all_zero():
    p = np.zeros((8, 8), dtype=np.float32)
    assert not nms_thin(p).any()


def test_nms_isolated_pixel_survives():
    p = np.zeros((9, 9), dtype=np.float32)
    p[4, 4] = 0.5
    out = nms_thin(p)
    assert out[4, 4] == np.float32(0.5)
    assert out.sum() == np.float32(0.5)


def test_nms_vertical_band_keeps_center_column():
    p = np.zeros((9, 9), dtype=np.float32)
    p[:, 3] = 0.2
    p[:, 4] = 0.9
    p[:, 5] = 0.2
    out = nms_thin(p)
    expected = nms_oracle(p)
    np.testing.assert_array_equal(out, expected)
    # frozen from the hand-evaluated oracle: the full center column survives
    assert (out[:, 4] == np.float32(0.9)).all()
    assert not out[:, 3].any() and not out[:, 5].any()
    assert not out[:, :3].any() and not out[:, 6:].any()


def test_nms_keeps_constant_thin_lines():
    # interior pixels of axis-aligned constant lines have zero gradient
    p = np.zeros((16, 16), dtype=np.float32)
    p[8, 2:14] = 1.0
    p[2:14, 4] = 1.0
    out = nms_thin(p)
    np.testing.assert_array_equal(out, p)


def test_nms_matches_oracle_on_random_maps(rng):
    for _ in range(5):
        p = (rng.random((17, 23)) ** 2).astype(np.float32)
        p[p < 0.3] = 0.0
        np.testing.assert_array_equal(nms_thin(p), nms_oracle(p))


def test_nms_never_increases_values(rng):
    p = rng.random((16, 16)).astype(np.float32)
    out = nms_thin(p)
    assert ((out == 0) | (out == p)).all()


def test_nms_numba_and_numpy_paths_agree(rng, monkeypatch):
    p = (rng.random((21, 19)) ** 1.5).astype(np.float32)
    fast = nms_thin(p)
    monkeypatch.setattr("obkit.raster.nms.NUMBA_ENABLED", False)
    slow = nms_thin(p)
    np.testing.assert_array_equal(fast, slow)


# ---------------------------------------------------------------- threshold


def test_threshold_inclusive_at_T():
    p = np.full((4, 4), 0.7, dtype=np.float32)
    out = threshold(p, ThresholdConfig(T=0.7, mode="binary"))
    assert out.dtype == np.bool_
    assert out.all()


def test_threshold_all_zero_any_T():
    p = np.zeros((4, 4), dtype=np.float32)
    assert not threshold(p, ThresholdConfig(T=0.5, mode="binary")).any()
    assert not threshold(p, ThresholdConfig(T=0.5, mode="non-binary")).any()


def test_threshold_non_binary_keeps_values():
    p = np.array([[0.2, 0.7, 0.9]], dtype=np.float32)
    out = threshold(p, ThresholdConfig(T=0.7, mode="non-binary"))
    np.testing.assert_array_equal(out, np.array([[0.0, 0.7, 0.9]], dtype=np.float32))


@settings(max_examples=30, deadline=None)
@given(
    t1=st.floats(0, 1, allow_nan=False),
    t2=st.floats(0, 1, allow_nan=False),
    seed=st.integers(0, 10_000),
)
def test_threshold_monotone(t1, t2, seed):
    lo, hi = min(t1, t2), max(t1, t2)
    p = np.random.default_rng(seed).random((8, 8)).astype(np.float32)
    on_hi = threshold(p, ThresholdConfig(T=hi, mode="binary"))
    on_lo = threshold(p, ThresholdConfig(T=lo, mode="binary"))
    assert (on_hi <= on_lo).all()


def test_threshold_config_validation():
    with pytest.raises(ValueError):
        ThresholdConfig(T=1.5)
    with pytest.raises(ValueError):
        ThresholdConfig(mode="weird")


# ---------------------------------------------------------------- thinning


def test_thin_diagonal_line_unchanged():
    b = np.zeros((8, 8), dtype=bool)
    for i in range(6):
        b[i + 1, i + 1] = True
    np.testing.assert_array_equal(morph_thin(b), b)


def test_thin_solid_block():
    b = np.zeros((8, 8), dtype=bool)
    b[2:6, 2:6] = True
    out = morph_thin(b)
    assert out.any()
    assert not has_2x2_block(out)
    assert (out <= b).all()
    _, n = ndimage.label(out, structure=np.ones((3, 3)))
    assert n == 1


def test_thin_empty():
    b = np.zeros((5, 5), dtype=bool)
    assert not morph_thin(b).any()


def test_thin_idempotent_on_random_blobs(rng):
    for _ in range(10):
        b = rng.random((24, 24)) < 0.35
        once = morph_thin(b)
        twice = morph_thin(once)
        np.testing.assert_array_equal(once, twice)
        assert not has_2x2_block(once)
        assert (once <= b).all()


def test_thin_preserves_component_count(rng):
    struct = np.ones((3, 3))
    for _ in range(10):
        b = rng.random((24, 24)) < 0.3
        out = morph_thin(b)
        _, n_in = ndimage.label(b, structure=struct)
        _, n_out = ndimage.label(out, structure=struct)
        assert n_in == n_out


def test_thin_numba_and_numpy_paths_agree(rng, monkeypatch):
    maps = [rng.random((20, 20)) < p for p in (0.2, 0.4, 0.6)]
    fast = [morph_thin(b) for b in maps]
    monkeypatch.setattr("obkit.raster.thinning.NUMBA_ENABLED", False)
    slow = [morph_thin(b) for b in maps]
    for f, s in zip(fast, slow):
        np.testing.assert_array_equal(f, s)


# ---------------------------------------------------------------- tracing


def test_trace_horizontal_run():
    b = np.zeros((5, 8), dtype=bool)
    b[2, 1:6] = True
    segs = trace_segments(b)
    assert len(segs) == 1
    assert len(segs[0]) == 5


def test_trace_t_shape():
    # 7-px bar with a 3-px stem below its center
    b = np.zeros((6, 9), dtype=bool)
    b[1, 1:8] = True
    b[2:5, 4] = True
    segs = trace_segments(b)
    assert len(segs) == 3
    assert sum(len(s) for s in segs) == 10
    np.testing.assert_array_equal(segments_to_map(segs, b.shape), b)


def test_trace_empty():
    assert trace_segments(np.zeros((4, 4), dtype=bool)) == []


def test_trace_rejects_thick_map():
    b = np.ones((2, 2), dtype=bool)
    with pytest.raises(NotThinError):
        trace_segments(b)


def test_trace_roundtrip_and_path_validity(rng):
    for _ in range(10):
        b = random_thin_map(rng)
        segs = trace_segments(b)
        np.testing.assert_array_equal(segments_to_map(segs, b.shape), b)
        seen = set()
        for seg in segs:
            pts = [tuple(p) for p in seg.points.tolist()]
            assert len(set(pts)) == len(pts)
            assert not (set(pts) & seen)
            seen.update(pts)
        assert len(seen) == int(b.sum())


def test_trace_cycle():
    b = np.zeros((6, 6), dtype=bool)
    b[1, 1:5] = True
    b[4, 1:5] = True
    b[1:5, 1] = True
    b[1:5, 4] = True
    segs = trace_segments(b)
    np.testing.assert_array_equal(segments_to_map(segs, b.shape), b)


# ---------------------------------------------------------------- dilation


def test_disk_r2_has_13_pixels():
    out = dilate_disk([(8, 8)], 2, (17, 17))
    assert int(out.sum()) == 13


def test_dilate_empty_points():
    assert not dilate_disk([], 3, (10, 10)).any()


def test_dilate_r0_single_pixel():
    out = dilate_disk([(3, 4)], 0, (10, 10))
    assert out[4, 3] and int(out.sum()) == 1


def test_dilate_matches_bruteforce_oracle(rng):
    for _ in range(5):
        pts = [(int(rng.integers(-4, 36)), int(rng.integers(-4, 36))) for _ in range(8)]
        r = int(rng.integers(0, 6))
        np.testing.assert_array_equal(
            dilate_disk(pts, r, (32, 32)), dilate_oracle(pts, r, (32, 32))
        )


def test_dilate_numba_and_numpy_paths_agree(rng, monkeypatch):
    pts = [(int(rng.integers(-3, 20)), int(rng.integers(-3, 20))) for _ in range(6)]
    fast = dilate_disk(pts, 3, (18, 18))
    monkeypatch.setattr("obkit.raster.dilation.NUMBA_ENABLED", False)
    slow = dilate_disk(pts, 3, (18, 18))
    np.testing.assert_array_equal(fast, slow)


def test_disk_offsets_negative_radius():
    with pytest.raises(ValueError):
        disk_offsets(-1)


# ---------------------------------------------------------------- file io


def test_obfmap_roundtrip_bits(tmp_path, rng):
    p = rng.random((7, 11)).astype(np.float32)
    path = tmp_path / "m.obfmap"
    write_obfmap(path, p)
    back = read_obfmap(path)
    assert back.dtype == np.float32
    np.testing.assert_array_equal(back, p)
    assert obfmap_bytes(p) == path.read_bytes()


def test_obfmap_header():
    blob = obfmap_bytes(np.zeros((2, 3), dtype=np.float32))
    assert blob[:8] == b"OBFMAP01"
    assert int.from_bytes(blob[8:12], "little") == 3
    assert int.from_bytes(blob[12:16], "little") == 2
    assert len(blob) == 16 + 4 * 6


def test_obfmap_rejects_garbage():
    with pytest.raises(ParseError):
        obfmap_from_bytes(b"NOTAMAP!" + b"\x00" * 16)
    with pytest.raises(ParseError):
        obfmap_from_bytes(obfmap_bytes(np.zeros((2, 2), dtype=np.float32))[:-1])


def test_mask_roundtrip(tmp_path, rng):
    b = rng.random((9, 9)) < 0.4
    path = tmp_path / "m.png"
    write_mask(path, b)
    np.testing.assert_array_equal(read_mask(path), b)
    assert mask_png_bytes(b) == path.read_bytes()


def test_mask_rejects_gray(tmp_path):
    from PIL import Image

    path = tmp_path / "bad.png"
    Image.fromarray(np.full((4, 4), 100, dtype=np.uint8), mode="L").save(path)
    with pytest.raises(ParseError):
        read_mask(path)


# ---------------------------------------------------------------- segments


def test_segment_validation():
    with pytest.raises(ValueError):
        BoundarySegment(np.array([[0, 0], [2, 0]]))  # gap
    with pytest.raises(ValueError):
        BoundarySegment(np.array([[1, 1], [1, 1]]))  # repeat
    seg = BoundarySegment(np.array([[0, 0], [1, 1], [2, 1]]))
    assert len(seg) == 3
