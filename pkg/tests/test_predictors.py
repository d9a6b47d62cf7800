import sys

import numpy as np
import pytest

from obkit.errors import ExternalFailureError, MissingInputError, ParseError
from obkit.interaction import FnFpMap, extract_residual_segments, refine, simulate_scribbles
from obkit.interaction.scribbles import ScribbleConfig
from obkit.predictors import (
    PredictorInput,
    PredictorSpec,
    gradient_predictor,
    oracle_noise_predictor,
    parse_predictor_spec,
    predict,
    run_external_predictor,
)
from obkit.raster import (
    ThresholdConfig,
    morph_thin,
    nms_thin,
    obfmap_bytes,
    threshold,
)

from conftest import random_thin_map


ECHO_SCRIPT = """
import shutil, sys
from pathlib import Path
wd = Path(sys.argv[1])
shutil.copyfile(wd / "prev.obfmap", wd / "out.obfmap")
"""


# ------------------------------------------------------------- gradient


def test_gradient_uniform_image_zero():
    img = np.full((16, 16, 3), 77, dtype=np.uint8)
    assert not gradient_predictor(img).any()


def test_gradient_step_edge_contrast_invariant():
    def step(c):
        img = np.full((32, 32, 3), 100, dtype=np.uint8)
        img[:, 16:] = 100 + c
        return img

    r1 = gradient_predictor(step(60))
    r2 = gradient_predictor(step(120))
    # the edge dominates the 99th percentile, so normalization cancels contrast
    np.testing.assert_allclose(r1[:, 14:18], r2[:, 14:18], atol=1e-6)
    assert r1[16, 15] > 0.5


def test_gradient_rotation_equivariant():
    rng = np.random.default_rng(3)
    img = (rng.random((24, 24, 3)) * 255).astype(np.uint8)
    out = gradient_predictor(img)
    out_rot = gradient_predictor(np.rot90(img).copy())
    np.testing.assert_allclose(out_rot, np.rot90(out), atol=1e-9)


def test_gradient_requires_rgb():
    with pytest.raises(MissingInputError):
        gradient_predictor(None)


# ------------------------------------------------------------- oracle


def test_oracle_identity_rates(rng):
    gt = random_thin_map(rng)
    out = oracle_noise_predictor(gt, 0.0, 0.0, np.random.default_rng(0))
    np.testing.assert_array_equal(out > 0, gt)
    post = morph_thin(threshold(nms_thin(out), ThresholdConfig()))
    fn, fp = extract_residual_segments(post, gt, 2.0)
    assert fn == [] and fp == []


def test_oracle_full_fn_rate_empties(rng):
    gt = random_thin_map(rng)
    out = oracle_noise_predictor(gt, 1.0, 0.0, np.random.default_rng(0))
    assert not out.any()


def test_oracle_deterministic(rng):
    gt = random_thin_map(rng)
    a = oracle_noise_predictor(gt, 0.5, 0.0, np.random.default_rng(11))
    b = oracle_noise_predictor(gt, 0.5, 0.0, np.random.default_rng(11))
    np.testing.assert_array_equal(a, b)


def test_oracle_rejects_bad_rates(rng):
    gt = random_thin_map(rng)
    with pytest.raises(ValueError):
        oracle_noise_predictor(gt, -0.1, 0.0, np.random.default_rng(0))


# ------------------------------------------------------------- spec


def test_parse_specs():
    assert parse_predictor_spec("gradient").kind == "gradient"
    s = parse_predictor_spec("oracle:/data/gt,0.3,0.25")
    assert s.kind == "oracle_noise" and s.gt_path == "/data/gt"
    assert (s.fn_rate, s.fp_rate) == (0.3, 0.25)
    e = parse_predictor_spec("extern:python3 run.py --flag")
    assert e.kind == "external" and e.command == "python3 run.py --flag"
    with pytest.raises(ParseError):
        parse_predictor_spec("magic")
    with pytest.raises(ParseError):
        parse_predictor_spec("oracle:only-a-path")
    with pytest.raises(ParseError):
        parse_predictor_spec("oracle:p,2.0,0.0")


def test_predict_output_in_range(rng):
    img = (rng.random((16, 16, 3)) * 255).astype(np.uint8)
    inp = PredictorInput.initial(img, (16, 16))
    out = predict(PredictorSpec(kind="gradient"), inp)
    assert out.shape == (16, 16)
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_predict_oracle_needs_gt(rng):
    inp = PredictorInput.initial(None, (8, 8))
    with pytest.raises(MissingInputError):
        predict(PredictorSpec(kind="oracle_noise", fn_rate=0.1), inp)


# ------------------------------------------------------------- external


def test_external_echo_roundtrip(tmp_path, rng):
    script = tmp_path / "echo.py"
    script.write_text(ECHO_SCRIPT)
    prev = rng.random((9, 13)).astype(np.float32)
    out = run_external_predictor(
        f"{sys.executable} {script}", None, FnFpMap.zeros((9, 13)), prev,
        workdir=tmp_path / "work",
    )
    np.testing.assert_array_equal(out, prev)
    assert obfmap_bytes(out) == obfmap_bytes(prev)


def test_external_nonzero_exit(tmp_path):
    script = tmp_path / "boom.py"
    script.write_text("import sys; sys.exit(3)")
    with pytest.raises(ExternalFailureError, match="exited 3"):
        run_external_predictor(
            f"{sys.executable} {script}", None, FnFpMap.zeros((4, 4)),
            np.zeros((4, 4), np.float32), workdir=tmp_path / "w",
        )


def test_external_missing_output(tmp_path):
    script = tmp_path / "noop.py"
    script.write_text("pass")
    with pytest.raises(ExternalFailureError, match="no out.obfmap"):
        run_external_predictor(
            f"{sys.executable} {script}", None, FnFpMap.zeros((4, 4)),
            np.zeros((4, 4), np.float32), workdir=tmp_path / "w",
        )


def test_external_timeout(tmp_path):
    script = tmp_path / "hang.py"
    script.write_text("import time; time.sleep(60)")
    with pytest.raises(ExternalFailureError, match="timed out"):
        run_external_predictor(
            f"{sys.executable} {script}", None, FnFpMap.zeros((4, 4)),
            np.zeros((4, 4), np.float32), timeout=1.0, workdir=tmp_path / "w",
        )


def test_external_clamps_out_of_range(tmp_path):
    script = tmp_path / "wild.py"
    script.write_text(
        "import struct, sys\n"
        "from pathlib import Path\n"
        "blob = b'OBFMAP01' + struct.pack('<II', 4, 4) + struct.pack('<16f', *([2.5] * 16))\n"
        "(Path(sys.argv[1]) / 'out.obfmap').write_bytes(blob)\n"
    )
    out = run_external_predictor(
        f"{sys.executable} {script}", None, FnFpMap.zeros((4, 4)),
        np.zeros((4, 4), np.float32), workdir=tmp_path / "w",
    )
    assert out.max() == 1.0


# ------------------------------------------------------------- loop


def test_oracle_loop_reaches_perfect_f(rng):
    """Corrupt, scribble every residual exactly, refine once: back to GT."""
    for trial in range(5):
        gt = random_thin_map(rng, shape=(48, 48), n_strokes=5)
        if not gt.any():
            continue
        seed = 100 + trial
        spec = PredictorSpec(kind="oracle_noise", fn_rate=0.4, fp_rate=0.0, seed=seed)
        inp0 = PredictorInput.initial(None, gt.shape)
        p0 = predict(spec, inp0, gt=gt, rng=np.random.default_rng(seed))
        prev = threshold(nms_thin(p0), ThresholdConfig(mode="non-binary"))
        pred0 = morph_thin(threshold(nms_thin(p0), ThresholdConfig()))
        fn, fp = extract_residual_segments(pred0, gt, 2.0)
        cfg = ScribbleConfig(disk_radius=4, max_position_perturbation=0,
                             length_perturbation_fraction=0.0)
        fnfp = simulate_scribbles(fn, fp, cfg, gt.shape[::-1], np.random.default_rng(0))
        inp1 = PredictorInput(rgb=None, fnfp=fnfp, prev=prev)
        cand = predict(spec, inp1, gt=gt, rng=np.random.default_rng(seed))
        refined = refine(prev, cand, fnfp)
        final = morph_thin(threshold(nms_thin(refined), ThresholdConfig()))
        fn2, fp2 = extract_residual_segments(final, gt, 2.0)
        assert fn2 == [] and fp2 == []
