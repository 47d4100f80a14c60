"""Run configuration contracts and the loader that merges bundled defaults."""
from __future__ import annotations

import json
import logging
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError, field_validator

from ..errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).resolve().parents[1] / "config" / "verify_defaults.json"


class QuadratureConfig(BaseModel):
    delta: float = Field(default=1.0, gt=0.0, allow_inf_nan=False, description="Split point of the Laplace integral in u")
    rel_tol: float = Field(default=1e-9, gt=0.0, lt=1.0, description="Relative tolerance of the adaptive quadrature")
    max_subdivisions: int = Field(default=400, ge=10, le=100000)


class Tolerances(BaseModel):
    kingman_zero_tol: float = Field(default=0.01, gt=0.0)
    kingman_alpha2_zero_tol: float = Field(default=0.1, gt=0.0)
    lambda_rel_tol: float = Field(default=0.10, gt=0.0)
    simultaneous_tol: float = Field(default=0.05, gt=0.0)
    pd_rel_tol: float = Field(default=0.10, gt=0.0)
    star_rel_tol: float = Field(default=0.10, gt=0.0)
    bs_second_order_rel_tol: float = Field(default=0.20, gt=0.0)
    rate_rel_tol: float = Field(default=0.05, gt=0.0)
    boundary_rel_tol: float = Field(default=0.20, gt=0.0)
    agreement_z: float = Field(default=4.0, gt=0.0, description="Allowed exact vs Monte Carlo distance in standard errors")


class ModelSpec(BaseModel):
    name: str
    params: dict[str, float] = Field(default_factory=dict)
    n_grid: list[int] | None = Field(default=None, description="Overrides the run-level N grid")
    transition_n: int | None = Field(default=None, ge=2, description="N for limit-transition tests; default is the largest grid N")

    @property
    def spec_string(self) -> str:
        body = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}:{body}" if body else self.name

    def build(self):
        from ..core.dist_catalog import build_model

        return build_model(self.name, self.params)


class RunConfig(BaseModel):
    models: list[ModelSpec] = Field(..., min_length=1)
    n_grid: list[int] = Field(default_factory=lambda: [100, 1000, 10000, 100000])
    sample_size: int = Field(default=4, ge=1, le=6, description="Lineages in the transition-frequency check")
    freq_n: int = Field(default=50, ge=2, description="Population size of the transition-frequency check")
    freq_steps: int = Field(default=20000, ge=0, description="Genealogy steps for transition frequencies; 0 disables")
    mc_reps: int = Field(default=2000, ge=2)
    mc_max_n: int = Field(default=100000, ge=1, description="Largest N for Monte Carlo c_N estimates")
    seed: int = Field(default=20240521, ge=0, lt=2**64)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    workers: int | None = Field(default=None, ge=1)
    out_dir: str = "reports"

    @field_validator("n_grid")
    @classmethod
    def _check_grid(cls, grid: list[int]) -> list[int]:
        if not grid or any(n < 2 for n in grid):
            raise ValueError("n_grid needs population sizes >= 2")
        return sorted(set(grid))


def _load_defaults() -> dict:
    if not DEFAULTS_PATH.exists():
        return {}
    try:
        return json.loads(DEFAULTS_PATH.read_text())
    except Exception:
        logger.warning("unreadable defaults file %s; using built-in defaults", DEFAULTS_PATH)
        return {}


def merge_defaults(data: dict, defaults: dict | None = None) -> dict:
    defaults = _load_defaults() if defaults is None else defaults
    merged = {**defaults, **data}
    for section in ("quadrature", "tolerances"):
        merged[section] = {**defaults.get(section, {}), **data.get(section, {})}
    return merged


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def build_run_config(data: dict, source: str = "<config>") -> RunConfig:
    try:
        return RunConfig.model_validate(merge_defaults(data))
    except ValidationError as exc:
        raise ConfigurationError(f"{source}: {_validation_message(exc)}") from exc


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}:1:1: top-level value must be an object")
    return build_run_config(data, str(path))
