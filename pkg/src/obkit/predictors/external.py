"""External-process predictor protocol.

The toolkit writes a work directory and invokes the configured command
with that directory as its sole extra argument. Layout:

    rgb.png       present only when the session has an image
    fn.png        FN scribble channel, 8-bit {0, 255}
    fp.png        FP scribble channel, 8-bit {0, 255}
    prev.obfmap   previous output, OBFMAP01
    work.manifest key-value description (width/height/filenames)

The process must exit 0 and write ``out.obfmap`` (same dimensions) into
the directory. Anything else: nonzero exit, timeout, missing or
malformed output, wrong dimensions, raises ExternalFailureError. Output
values are clamped to [0, 1] at this boundary.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from pathlib import Path

import numpy as np

from ..errors import ExternalFailureError, ParseError
from ..raster import ProbabilityMap, read_obfmap, write_mask, write_obfmap, write_rgb

__all__ = ["run_external_predictor", "DEFAULT_TIMEOUT"]

DEFAULT_TIMEOUT = 300.0


def write_work_dir(workdir: Path, rgb, fnfp, prev) -> None:
    h, w = prev.shape
    lines = ["obkit-predictor-work 1", f"width {w}", f"height {h}"]
    if rgb is not None:
        write_rgb(workdir / "rgb.png", rgb)
        lines.append("rgb rgb.png")
    write_mask(workdir / "fn.png", fnfp.fn)
    write_mask(workdir / "fp.png", fnfp.fp)
    write_obfmap(workdir / "prev.obfmap", prev)
    lines += ["fn fn.png", "fp fp.png", "prev prev.obfmap", "out out.obfmap"]
    (workdir / "work.manifest").write_text("\n".join(lines) + "\n")


def run_external_predictor(command: str, rgb, fnfp, prev,
                           timeout: float = DEFAULT_TIMEOUT,
                           workdir=None) -> ProbabilityMap:
    if not command.strip():
        raise ExternalFailureError("empty external predictor command")
    own_dir = workdir is None
    workdir = Path(tempfile.mkdtemp(prefix="obkit-extern-")) if own_dir else Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    write_work_dir(workdir, rgb, fnfp, prev)
    argv = shlex.split(command) + [str(workdir)]
    try:
        proc = subprocess.run(argv, capture_output=True, timeout=timeout)
    except subprocess.TimeoutExpired as e:
        raise ExternalFailureError(f"external predictor timed out after {timeout}s") from e
    except OSError as e:
        raise ExternalFailureError(f"cannot launch external predictor: {e}") from e
    if proc.returncode != 0:
        tail = proc.stderr.decode(errors="replace")[-500:]
        raise ExternalFailureError(
            f"external predictor exited {proc.returncode}: {tail.strip()}"
        )
    out_path = workdir / "out.obfmap"
    if not out_path.is_file():
        raise ExternalFailureError(f"external predictor wrote no {out_path.name}")
    try:
        out = read_obfmap(out_path, validate=False)
    except ParseError as e:
        raise ExternalFailureError(f"malformed predictor output: {e}") from e
    if out.shape != prev.shape:
        raise ExternalFailureError(
            f"predictor output {out.shape} does not match input {prev.shape}"
        )
    if not np.isfinite(out).all():
        raise ExternalFailureError("predictor output contains non-finite values")
    return np.clip(out, 0.0, 1.0).astype(np.float32)
