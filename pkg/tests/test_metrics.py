import numpy as np
import pytest

from obkit.errors import DimensionMismatchError, EmptyDatasetError, NotThinError
from obkit.metrics import (
    EvalReport,
    MatchConfig,
    PrPoint,
    avg_fn_fp,
    f_measure,
    match_boundaries,
    pr_curve,
    read_report,
    summarize,
    write_report,
)
from obkit.raster import BoundarySegment

from conftest import random_thin_map


def line(shape, y, x0, x1):
    out = np.zeros(shape, dtype=bool)
    out[y, x0:x1] = True
    return out


def make_point(t, tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 1.0
    r = tp / (tp + fn) if tp + fn else 1.0
    return PrPoint(threshold=t, tp=tp, fp_count=fp, fn_count=fn, precision=p, recall=r)


def curve_from_counts(counts):
    grid = np.arange(1, len(counts) + 1) / (len(counts) + 1)
    return [make_point(float(t), *c) for t, c in zip(grid, counts)]


# ------------------------------------------------------------- matching


def test_match_identical_maps(rng):
    gt = random_thin_map(rng)
    n = int(gt.sum())
    assert match_boundaries(gt, gt, 2.0) == (n, 0, 0)


def test_match_empty_prediction(rng):
    gt = random_thin_map(rng)
    n = int(gt.sum())
    tp, fp, fn = match_boundaries(np.zeros_like(gt), gt, 2.0)
    assert (tp, fp, fn) == (0, 0, n)


def test_match_shifted_line_within_tolerance():
    a = line((32, 32), 10, 5, 25)
    b = line((32, 32), 11, 5, 25)
    tp, fp, fn = match_boundaries(a, b, 2.0)
    assert (tp, fp, fn) == (20, 0, 0)


def test_match_outside_tolerance():
    a = line((32, 32), 5, 5, 25)
    b = line((32, 32), 20, 5, 25)
    tp, fp, fn = match_boundaries(a, b, 3.0)
    assert tp == 0 and fp == 20 and fn == 20


def test_match_rejects_bad_inputs():
    with pytest.raises(DimensionMismatchError):
        match_boundaries(np.zeros((4, 4), bool), np.zeros((5, 5), bool), 1.0)
    thick = np.zeros((4, 4), bool)
    thick[1:3, 1:3] = True
    with pytest.raises(NotThinError):
        match_boundaries(thick, np.zeros((4, 4), bool), 1.0)


def test_match_greedy_close_to_exact(rng):
    worst = 1.0
    for _ in range(30):
        a = random_thin_map(rng, shape=(24, 24))
        b = random_thin_map(rng, shape=(24, 24))
        for d in (1.5, 2.0, 3.0):
            tp_g, _, _ = match_boundaries(a, b, d)
            tp_e, _, _ = match_boundaries(a, b, d, method="exact")
            assert tp_g <= tp_e
            if tp_e:
                worst = min(worst, tp_g / tp_e)
    assert worst >= 0.98


def test_match_numba_and_numpy_paths_agree(rng, monkeypatch):
    a = random_thin_map(rng, shape=(28, 28))
    b = random_thin_map(rng, shape=(28, 28))
    fast = match_boundaries(a, b, 2.5)
    monkeypatch.setattr("obkit.metrics.matching.NUMBA_ENABLED", False)
    slow = match_boundaries(a, b, 2.5)
    assert fast == slow


# ------------------------------------------------------------- pr curve


def test_pr_perfect_prediction(rng):
    gt = random_thin_map(rng)
    prob = gt.astype(np.float32)
    curve = pr_curve(prob, gt, MatchConfig(thresholds=20))
    for pt in curve:
        assert pt.precision == 1.0 and pt.recall == 1.0


def test_pr_all_zero_prediction(rng):
    gt = random_thin_map(rng)
    curve = pr_curve(np.zeros_like(gt, dtype=np.float32), gt, MatchConfig(thresholds=10))
    for pt in curve:
        assert pt.recall == 0.0 and pt.precision == 1.0


def test_pr_two_regimes():
    # gt line carried at 0.6 plus one far spurious pixel at 0.9
    gt = line((40, 40), 10, 5, 35)
    prob = gt.astype(np.float32) * 0.6
    prob[30, 30] = 0.9
    curve = pr_curve(prob, gt, MatchConfig(thresholds=99))
    for pt in curve:
        if 0.6 < pt.threshold <= 0.9:
            assert pt.tp == 0 and pt.fp_count == 1
            assert pt.precision == 0.0 and pt.recall == 0.0
        elif pt.threshold <= 0.6:
            assert pt.tp == 30 and pt.fp_count == 1
            assert pt.recall == 1.0
        else:
            assert pt.tp == 0 and pt.fp_count == 0
            assert pt.precision == 1.0


def test_threshold_grid_uniform():
    grid = MatchConfig(thresholds=99).threshold_grid()
    assert len(grid) == 99
    assert grid[0] == pytest.approx(0.01)
    assert grid[-1] == pytest.approx(0.99)
    np.testing.assert_allclose(np.diff(grid), 0.01)


def test_d_max_scales_with_diagonal():
    cfg = MatchConfig()
    d1 = cfg.d_max((100, 200))
    d2 = cfg.d_max((200, 400))
    assert d2 == pytest.approx(2 * d1)


# ------------------------------------------------------------- summarize


def test_summarize_perfect():
    curves = [curve_from_counts([(10, 0, 0)] * 9) for _ in range(3)]
    rep = summarize(curves)
    assert rep.ods == rep.ois == rep.ap == 1.0


def test_summarize_single_image_ois_equals_ods():
    counts = [(8, 0, 2), (9, 1, 1), (6, 0, 4)]
    rep = summarize([curve_from_counts(counts)])
    assert rep.ois == pytest.approx(rep.ods)


def test_summarize_ois_exceeds_ods_when_best_thresholds_differ():
    # image A peaks at t1, image B peaks at t2
    a = curve_from_counts([(10, 0, 0), (5, 5, 5)])
    b = curve_from_counts([(5, 5, 5), (10, 0, 0)])
    rep = summarize([a, b])
    assert rep.ois > rep.ods


def test_summarize_empty_rejected():
    with pytest.raises(EmptyDatasetError):
        summarize([])


def test_summarize_mismatched_grids_rejected():
    a = curve_from_counts([(1, 0, 0), (1, 0, 0)])
    b = curve_from_counts([(1, 0, 0), (1, 0, 0), (1, 0, 0)])
    with pytest.raises(ValueError):
        summarize([a, b])


def test_ap_hand_computed_two_point_curve():
    # aggregate curve: t=1/3 -> P=0.5, R=1.0; t=2/3 -> P=1.0, R=0.5
    curves = [curve_from_counts([(10, 10, 0), (5, 0, 5)])]
    rep = summarize(curves)
    # interpolated precision: 1.0 for r <= 0.5 (51 levels), 0.5 for r > 0.5 (50)
    expected = (51 * 1.0 + 50 * 0.5) / 101
    assert rep.ap == pytest.approx(expected)


def test_ois_at_least_ods_on_probability_sweeps(rng):
    """Dominance of per-image best thresholds, on curves from real sweeps.

    Not a theorem for arbitrary count tables under count aggregation, but
    it holds on probability-map datasets, which is what the protocol
    evaluates.
    """
    cfg = MatchConfig(thresholds=19)
    for _ in range(5):
        curves = []
        for _ in range(4):
            gt = random_thin_map(rng, shape=(32, 32))
            prob = gt.astype(np.float32) * rng.uniform(0.3, 1.0)
            noise_px = rng.random((32, 32)) < 0.01
            prob = np.maximum(prob, noise_px * rng.random((32, 32)).astype(np.float32))
            curves.append(pr_curve(np.clip(prob, 0, 1).astype(np.float32), gt, cfg))
        rep = summarize(curves)
        assert rep.ois >= rep.ods - 1e-12


# ------------------------------------------------------------- avg fn/fp


def seg_of_length(n):
    return BoundarySegment(np.array([[i, 0] for i in range(n)], dtype=np.int32))


def test_avg_fn_fp_no_scribbles(rng):
    gts = [random_thin_map(rng) for _ in range(3)]
    assert avg_fn_fp([([], [])] * 3, gts) == (0.0, 0.0)


def test_avg_fn_fp_hand_computed_single():
    gt = np.zeros((10, 10), dtype=bool)
    gt[5, :] = True  # 10 gt pixels, 90 off
    fn = [seg_of_length(4)]
    fp = [seg_of_length(9)]
    a_fn, a_fp = avg_fn_fp([(fn, fp)], [gt])
    assert a_fn == pytest.approx(0.4, abs=1e-12)
    assert a_fp == pytest.approx(9 / 90, abs=1e-12)


def test_avg_fn_fp_unweighted_mean():
    gt1 = np.zeros((10, 10), dtype=bool)
    gt1[0, :] = True
    gt2 = np.zeros((20, 20), dtype=bool)
    gt2[0, :] = True
    per = [([seg_of_length(2)], []), ([seg_of_length(8)], [])]
    a_fn, _ = avg_fn_fp(per, [gt1, gt2])
    assert a_fn == pytest.approx((2 / 10 + 8 / 20) / 2, abs=1e-12)


def test_avg_fn_excludes_empty_gt():
    gt_empty = np.zeros((10, 10), dtype=bool)
    gt = np.zeros((10, 10), dtype=bool)
    gt[0, :5] = True
    a_fn, _ = avg_fn_fp([([seg_of_length(5)], []), ([seg_of_length(2)], [])], [gt_empty, gt])
    assert a_fn == pytest.approx(2 / 5, abs=1e-12)


# ------------------------------------------------------------- report io


def test_report_roundtrip(tmp_path):
    rep = EvalReport(ods=0.87, ois=0.9, ap=0.85, ods_threshold=0.42,
                     avg_fn=0.123456, avg_fp=0.00042)
    write_report(tmp_path / "r.txt", rep, extra={"thresholds": 99})
    back = read_report(tmp_path / "r.txt")
    assert back.ods == pytest.approx(0.87)
    assert back.ois == pytest.approx(0.9)
    assert back.avg_fn == pytest.approx(0.123456)
    assert back.avg_fp == pytest.approx(0.00042)


def test_f_measure_degenerate():
    assert f_measure(0, 0, 0) == 1.0  # both empty: P = R = 1
    assert f_measure(0, 5, 5) == 0.0
