"""Zeroth-order adaptive optimization: R-AdaZO, four baselines and a benchmark harness."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .errors import (  # noqa: E402
    ArgumentError,
    DimensionError,
    DomainError,
    EvaluationError,
    UndefinedReferenceError,
    UsageError,
    ZoBenchError,
)
from .estimator import EstimatorConfig, GradientEstimate, estimate_gradient  # noqa: E402
from .objectives import NoiseModel, ObjectiveKind, ObjectiveSpec, evaluate, optimality_gap, true_gradient  # noqa: E402
from .optimizers import HyperParams, OptimizerKind, OptimizerState, new_state, run, step  # noqa: E402
from .sampler import RandomSource, sample_ball, sample_sphere  # noqa: E402

__all__ = [
    "BACKEND",
    "ArgumentError",
    "DimensionError",
    "DomainError",
    "EstimatorConfig",
    "EvaluationError",
    "GradientEstimate",
    "HyperParams",
    "NoiseModel",
    "ObjectiveKind",
    "ObjectiveSpec",
    "OptimizerKind",
    "OptimizerState",
    "RandomSource",
    "UndefinedReferenceError",
    "UsageError",
    "ZoBenchError",
    "estimate_gradient",
    "evaluate",
    "new_state",
    "optimality_gap",
    "run",
    "sample_ball",
    "sample_sphere",
    "step",
    "true_gradient",
]
