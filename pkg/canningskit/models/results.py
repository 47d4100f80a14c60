from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, Field

MomentMethod = Literal["integral", "closed-form", "monte-carlo"]
TestKind = Literal["abs", "rel", "le", "ge", "trend", "z"]


class MomentResult(BaseModel):
    value: float
    error: float = Field(default=0.0, ge=0.0, description="Estimated absolute error of value")
    method: MomentMethod
    N: int = Field(..., ge=1)
    j: int = Field(..., ge=1)
    ks: list[int]
    note: str | None = None


class EstimateCI(BaseModel):
    value: float
    se: float = Field(..., ge=0.0)
    reps: int = Field(..., ge=2)
    seed: int
    method: str = "monte-carlo"

    def z_against(self, value: float, error: float = 0.0) -> float:
        """Distance to an exact value in units of the combined standard error."""
        scale = math.hypot(self.se, error)
        if scale == 0.0:
            return 0.0 if self.value == value else math.inf
        return (self.value - value) / scale


class ConsistencyResidual(BaseModel):
    N: int
    j: int
    ks: list[int]
    residual: float
    bound: float = Field(..., ge=0.0)

    @property
    def ok(self) -> bool:
        return abs(self.residual) <= self.bound


class MrcaSummary(BaseModel):
    mean: float
    se: float = Field(..., ge=0.0)
    absorbed: int
    unabsorbed: int
    horizon: int
    seed: int


class CurveRow(BaseModel):
    model: str
    N: int
    cn_exact: float
    cn_exact_err: float = 0.0
    cn_mc: float | None = None
    cn_mc_se: float | None = None
    cn_predicted: float
    ratio: float
    regime: str


class TransitionTest(BaseModel):
    name: str
    N: int
    query: str
    observed: float
    target: float
    tolerance: float
    kind: TestKind
    passed: bool


class ModelReport(BaseModel):
    model: str
    regime: str
    regime_label: str
    branch: str
    alpha: str
    mu: float | None
    rho: float | None
    n_grid: list[int]
    curve: list[CurveRow] = Field(default_factory=list)
    tests: list[TransitionTest] = Field(default_factory=list)
    passed: bool


class VerificationReport(BaseModel):
    tool: str = "canningskit"
    version: str
    config: dict
    models: list[ModelReport]
    passed: bool

    @property
    def failed_tests(self) -> list[tuple[str, TransitionTest]]:
        return [(m.model, t) for m in self.models for t in m.tests if not t.passed]
