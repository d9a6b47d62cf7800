"""Predictor plug-ins: baselines plus the external-process protocol."""

from .external import DEFAULT_TIMEOUT, run_external_predictor
from .gradient import gradient_predictor
from .oracle import oracle_noise_predictor, scribble_aware_oracle
from .spec import PredictorInput, PredictorSpec, parse_predictor_spec, predict

__all__ = [
    "DEFAULT_TIMEOUT",
    "PredictorInput",
    "PredictorSpec",
    "gradient_predictor",
    "oracle_noise_predictor",
    "parse_predictor_spec",
    "predict",
    "run_external_predictor",
    "scribble_aware_oracle",
]
