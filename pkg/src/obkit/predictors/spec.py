"""Uniform predictor interface and the CLI spec grammar.

Specs: ``gradient`` | ``oracle:<gt-path>,<fn_rate>,<fp_rate>`` |
``extern:<command>``. The oracle gt-path may be a directory (resolved
per sample id by the pipeline) or a single mask file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import MissingInputError, ParseError
from ..interaction.scribbles import FnFpMap
from ..raster import ProbabilityMap
from .external import DEFAULT_TIMEOUT, run_external_predictor
from .gradient import gradient_predictor
from .oracle import scribble_aware_oracle

__all__ = ["PredictorInput", "PredictorSpec", "parse_predictor_spec", "predict"]

KINDS = ("gradient", "oracle_noise", "external")


@dataclass(frozen=True)
class PredictorInput:
    """The six-channel contract: rgb (3) + fn-fp map (2) + previous output (1)."""

    rgb: Optional[np.ndarray]
    fnfp: FnFpMap
    prev: ProbabilityMap

    def __post_init__(self):
        shape = self.prev.shape
        if self.fnfp.shape != shape:
            raise ValueError(f"fnfp {self.fnfp.shape} vs prev {shape}")
        if self.rgb is not None and self.rgb.shape[:2] != shape:
            raise ValueError(f"rgb {self.rgb.shape[:2]} vs prev {shape}")

    @classmethod
    def initial(cls, rgb, shape) -> "PredictorInput":
        """All-zero interaction map and previous output (the first pass)."""
        return cls(rgb=rgb, fnfp=FnFpMap.zeros(shape),
                   prev=np.zeros(shape, dtype=np.float32))


@dataclass(frozen=True)
class PredictorSpec:
    kind: str
    gt_path: Optional[str] = None
    fn_rate: float = 0.0
    fp_rate: float = 0.0
    seed: Optional[int] = None
    command: Optional[str] = None
    timeout: float = DEFAULT_TIMEOUT
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParseError(f"unknown predictor kind {self.kind!r}")
        if not (0.0 <= self.fn_rate <= 1.0 and 0.0 <= self.fp_rate <= 1.0):
            raise ParseError("oracle rates must lie in [0, 1]")
        if self.kind == "external" and not self.command:
            raise ParseError("external predictor needs a command")


def parse_predictor_spec(text: str) -> PredictorSpec:
    text = text.strip()
    if text == "gradient":
        return PredictorSpec(kind="gradient")
    if text.startswith("oracle:"):
        body = text[len("oracle:"):]
        parts = body.rsplit(",", 2)
        if len(parts) != 3:
            raise ParseError(
                f"oracle spec needs gt-path,fn_rate,fp_rate, got {text!r}"
            )
        try:
            fn_rate, fp_rate = float(parts[1]), float(parts[2])
        except ValueError as e:
            raise ParseError(f"oracle rates must be numbers in {text!r}") from e
        return PredictorSpec(kind="oracle_noise", gt_path=parts[0],
                             fn_rate=fn_rate, fp_rate=fp_rate)
    if text.startswith("extern:"):
        return PredictorSpec(kind="external", command=text[len("extern:"):])
    raise ParseError(f"cannot parse predictor spec {text!r}")


def predict(spec: PredictorSpec, inp: PredictorInput, *, gt=None, fp_source=(),
            rng: Optional[np.random.Generator] = None,
            workdir=None) -> ProbabilityMap:
    """Run the configured predictor: a same-size map with values in [0, 1]."""
    if spec.kind == "gradient":
        out = gradient_predictor(inp.rgb)
    elif spec.kind == "oracle_noise":
        if gt is None:
            raise MissingInputError("oracle predictor needs the per-image gt map")
        if rng is None:
            rng = np.random.default_rng(spec.seed)
        out = scribble_aware_oracle(gt, spec.fn_rate, spec.fp_rate, rng,
                                    inp.fnfp, fp_source)
    else:
        out = run_external_predictor(spec.command, inp.rgb, inp.fnfp, inp.prev,
                                     timeout=spec.timeout, workdir=workdir)
    if out.shape != inp.prev.shape:
        raise ValueError(f"predictor returned {out.shape}, expected {inp.prev.shape}")
    return out
