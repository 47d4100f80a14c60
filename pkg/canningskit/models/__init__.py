from .config import ModelSpec, QuadratureConfig, RunConfig, Tolerances, build_run_config, load_run_config
from .results import (
    ConsistencyResidual,
    CurveRow,
    EstimateCI,
    ModelReport,
    MomentResult,
    MrcaSummary,
    TransitionTest,
    VerificationReport,
)

__all__ = [
    "ConsistencyResidual",
    "CurveRow",
    "EstimateCI",
    "ModelReport",
    "ModelSpec",
    "MomentResult",
    "MrcaSummary",
    "QuadratureConfig",
    "RunConfig",
    "Tolerances",
    "TransitionTest",
    "VerificationReport",
    "build_run_config",
    "load_run_config",
]
