import json

import numpy as np
import pytest

from obkit.cli import main
from obkit.metrics import read_report
from obkit.raster import read_mask, read_obfmap, write_mask, write_obfmap

QUAD_OBJ = "v -0.5 -0.5 2\nv 0.5 -0.5 2\nv 0.5 0.5 2\nv -0.5 0.5 2\nf 1 2 3 4\n"


def scene_text(size=64):
    return (
        "mesh quad.obj\n"
        f"camera.width {size}\ncamera.height {size}\n"
        f"camera.fx {size}\ncamera.fy {size}\n"
        f"camera.cx {size / 2}\ncamera.cy {size / 2}\n"
        "camera.rotation 1 0 0 0 1 0 0 0 1\n"
        "camera.translation 0 0 0\n"
    )


@pytest.fixture
def scene_dir(tmp_path):
    d = tmp_path / "scenes"
    d.mkdir()
    (d / "quad.obj").write_text(QUAD_OBJ)
    (d / "one.scene").write_text(scene_text())
    return d


def gt_fixture(tmp_path, rng, n=3):
    from conftest import random_thin_map

    gt_dir = tmp_path / "gt"
    pred_dir = tmp_path / "pred"
    gt_dir.mkdir()
    pred_dir.mkdir()
    for i in range(n):
        gt = random_thin_map(rng, shape=(48, 48))
        write_mask(gt_dir / f"im{i}.png", gt)
        write_obfmap(pred_dir / f"im{i}.obfmap", gt.astype(np.float32))
    return pred_dir, gt_dir


def test_generate_single_scene(tmp_path, scene_dir, capsys):
    out = tmp_path / "bench"
    assert main(["generate", "--scene", str(scene_dir / "one.scene"), "--out", str(out)]) == 0
    assert (out / "manifest").is_file()
    mask = read_mask(out / "gt" / "one.png")
    assert mask.any()
    depth = read_obfmap(out / "depth" / "one.obfmap", validate=False)
    assert depth.max() > 0


def test_generate_scene_dir(tmp_path, scene_dir):
    (scene_dir / "two.scene").write_text(scene_text())
    out = tmp_path / "bench"
    assert main(["generate", "--scene", str(scene_dir), "--out", str(out)]) == 0
    from obkit.dataset import load_benchmark

    m = load_benchmark(out / "manifest")
    assert m.sample_ids() == ["one", "two"]


def test_generate_missing_scene_names_path(tmp_path, capsys):
    rc = main(["generate", "--scene", str(tmp_path / "missing.scene"), "--out", str(tmp_path / "o")])
    captured = capsys.readouterr()
    assert rc == 1
    assert "missing.scene" in captured.err
    assert len([l for l in captured.err.strip().splitlines() if "missing.scene" in l]) == 1


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "--nonsense"])
    assert exc.value.code == 1


def test_evaluate_perfect_predictions(tmp_path, rng, capsys):
    pred_dir, gt_dir = gt_fixture(tmp_path, rng)
    report_path = tmp_path / "report.txt"
    rc = main(["evaluate", "--pred", str(pred_dir), "--gt", str(gt_dir),
               "--thresholds", "9", "--out", str(report_path)])
    assert rc == 0
    rep = read_report(report_path)
    assert rep.ods == 1.0 and rep.ois == 1.0 and rep.ap == 1.0


def test_evaluate_missing_prediction(tmp_path, rng, capsys):
    pred_dir, gt_dir = gt_fixture(tmp_path, rng)
    (pred_dir / "im0.obfmap").unlink()
    rc = main(["evaluate", "--pred", str(pred_dir), "--gt", str(gt_dir),
               "--out", str(tmp_path / "r.txt")])
    assert rc == 1
    assert "im0" in capsys.readouterr().err


def test_simulate_perfect_oracle_no_scribbles(tmp_path, rng, capsys):
    _, gt_dir = gt_fixture(tmp_path, rng, n=2)
    out = tmp_path / "sim"
    rc = main(["simulate", "--gt", str(gt_dir), "--predictor", "oracle:.,0,0",
               "--out", str(out), "--seed", "3"])
    assert rc == 0
    summary = (out / "summary.txt").read_text()
    assert "fn_px 0" in summary and "fp_px 0" in summary
    for i in range(2):
        fn = read_mask(out / f"im{i}_fn.png")
        fp = read_mask(out / f"im{i}_fp.png")
        assert not fn.any() and not fp.any()
        initial = read_obfmap(out / f"im{i}_initial.obfmap")
        refined = read_obfmap(out / f"im{i}_refined.obfmap")
        np.testing.assert_array_equal(initial, refined)


def test_simulate_deterministic_across_jobs(tmp_path, rng):
    _, gt_dir = gt_fixture(tmp_path, rng, n=3)
    outs = []
    for jobs, name in ((1, "a"), (2, "b")):
        out = tmp_path / name
        rc = main(["simulate", "--gt", str(gt_dir), "--predictor", "oracle:.,0.4,0.2",
                   "--out", str(out), "--seed", "11", "--jobs", str(jobs),
                   "--min-seg-len", "5", "--radius", "4"])
        assert rc == 0
        outs.append(out)
    a, b = outs
    files_a = sorted(p.name for p in a.iterdir() if p.is_file())
    files_b = sorted(p.name for p in b.iterdir() if p.is_file())
    assert files_a == files_b
    for name in files_a:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_refine_subcommand(tmp_path):
    prev = np.zeros((32, 32), dtype=np.float32)
    prev[10, 5:25] = 1.0
    prev[20, 5:25] = 1.0
    write_obfmap(tmp_path / "prev.obfmap", prev)
    doc = {"strokes": [{"channel": "fp", "points": [[5, 20], [24, 20]], "radius": 3}]}
    (tmp_path / "scrib.json").write_text(json.dumps(doc))
    out = tmp_path / "out"
    rc = main(["refine", "--prev", str(tmp_path / "prev.obfmap"),
               "--scribbles", str(tmp_path / "scrib.json"), "--out", str(out)])
    assert rc == 0
    mask = read_mask(out / "refined_mask.png")
    assert not mask[20].any()  # scribbled-away row
    assert mask[10].any()  # untouched row survives
