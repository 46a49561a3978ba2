"""
Run configuration: JSON files validated by pydantic, with DISCLOSURE_* env overrides.

Precedence for the overridable knobs is CLI flag > env var > file > default.
"""

import json
import logging
import os
from pathlib import Path
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from belief_core import SenderSpec
from errors import ConfigError
from signal_models import (
    DiscreteSignalModel,
    beta_precision_model,
    four_signal_model,
    model_from_curve_samples,
    normal_precision_model,
    uniform_model,
)

logger = logging.getLogger(__name__)

ENV_PREFIX = "DISCLOSURE_"

GAME_KINDS = ("single", "two", "many", "sequential", "correlated", "uncertain_bias")
SWEEP_PARAMS = ("p1", "p2", "c", "rho")


class SolverOptions(BaseModel):
    """Numerical knobs. Defaults are the documented tolerances."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scan_grid:          int   = Field(2048, ge=16)
    root_tol:           float = Field(1e-10, gt=0)
    branch_cells:       int   = Field(16, ge=1)
    branch_nodes:       int   = Field(16, ge=2)
    tarski_max_iter:    int   = Field(500, ge=1)
    tarski_tol:         float = Field(1e-9, gt=0)
    certify_tol:        float = Field(1e-7, gt=0)
    boundary_slack:     float = Field(1e-10, ge=0)
    grid_resolution:    int   = Field(512, ge=8, le=4096)
    weight_grid:        int   = Field(101, ge=2)
    many_scan_grid:     int   = Field(512, ge=16)
    many_branch_cells:  int   = Field(4, ge=1)
    sequential_scan:    int   = Field(256, ge=16)
    policy_grid:        int   = Field(64, ge=4)
    curve_grid:         int   = Field(512, ge=8)
    monotone_noise:     float = Field(1e-7, ge=0)
    mc_draws:           int   = Field(1_000_000, ge=1)
    mc_streams:         int   = Field(8, ge=1)
    seed:               int   = Field(20240917, ge=0, lt=2 ** 64)
    threads:            Optional[int] = Field(None, ge=1)
    tolerance:          float = Field(5e-5, gt=0)

    def describe(self) -> str:
        return (
            f"scan_grid={self.scan_grid} root_tol={self.root_tol:g} "
            f"branch={self.branch_cells}x{self.branch_nodes} tarski_tol={self.tarski_tol:g} "
            f"certify_tol={self.certify_tol:g} grid_resolution={self.grid_resolution} "
            f"weight_grid={self.weight_grid} seed={self.seed} tolerance={self.tolerance:g}"
        )


class ModelSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind:    Literal["uniform", "beta", "normal", "discrete", "four_signal", "curve"]
    prior:   float = Field(0.5, gt=0, lt=1)
    rho:     Optional[float] = None
    support: Tuple[float, float] = (0.0, 1.0)
    table:   Optional[List[Tuple[float, float, float]]] = None
    gamma:   Optional[float] = None
    delta:   Optional[float] = None
    curve:   Optional[List[Tuple[float, float]]] = None

    @model_validator(mode="after")
    def _required_fields(self):
        needs = {
            "beta": ("rho",),
            "normal": ("rho",),
            "discrete": ("table",),
            "four_signal": ("gamma", "delta"),
            "curve": ("curve",),
        }.get(self.kind, ())
        missing = [name for name in needs if getattr(self, name) is None]
        if missing:
            raise ValueError(f"model kind '{self.kind}' requires {', '.join(missing)}")
        return self

    def build(self, rho: Optional[float] = None):
        """Construct the signal model. `rho` overrides the file value during sweeps."""
        return self.build_with_informedness(rho)[0]

    def build_with_informedness(self, rho: Optional[float] = None):
        """(model, p implied by a target curve or None)."""
        rho = self.rho if rho is None else rho
        if self.kind == "uniform":
            return uniform_model(*self.support), None
        if self.kind == "beta":
            return beta_precision_model(rho), None
        if self.kind == "normal":
            return normal_precision_model(rho, self.prior), None
        if self.kind == "four_signal":
            return four_signal_model(self.gamma, self.delta, self.prior), None
        if self.kind == "discrete":
            values, p0, p1 = zip(*self.table)
            return DiscreteSignalModel(self.prior, values, p0, p1, name="table"), None
        s_values, psi_values = zip(*self.curve)
        _, p, model = model_from_curve_samples(s_values, psi_values)
        return model, p


class SenderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p:    float = Field(gt=0, le=1)
    bias: Literal["up", "down"] = "up"


class UtilityConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind:  Literal["linear", "power"] = "linear"
    alpha: float = 1.0
    gamma: float = 1.0


class SweepAxis(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name:  str
    start: float
    stop:  float
    num:   int = Field(ge=1, le=10_000)

    @field_validator("name")
    @classmethod
    def _known_param(cls, value):
        if value not in SWEEP_PARAMS:
            raise ValueError(f"unsupported sweep parameter '{value}' (choose from {', '.join(SWEEP_PARAMS)})")
        return value

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """NAME=start:stop:num"""
        try:
            name, rest = text.split("=", 1)
            start, stop, num = rest.split(":")
            return cls(name=name.strip(), start=float(start), stop=float(stop), num=int(num))
        except ValidationError as e:
            raise ConfigError(_format_validation(e, f"--axis {text}")) from e
        except ValueError as e:
            raise ConfigError(f"--axis {text}: expected NAME=start:stop:num ({e})") from e

    def values(self):
        return np.linspace(self.start, self.stop, self.num)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model:          ModelSpec
    game:           Literal["single", "two", "many", "sequential", "correlated", "uncertain_bias"] = "single"
    senders:        List[SenderConfig] = Field(min_length=1)
    c:              float = 0.0
    lam:            float = Field(0.5, ge=0, le=1)
    correlated_bias: Literal["same", "opposing"] = "opposing"
    utility:        UtilityConfig = UtilityConfig()
    solver:         SolverOptions = SolverOptions()
    axes:           List[SweepAxis] = Field(default_factory=list)
    out:            str = "results"

    @model_validator(mode="after")
    def _sender_count(self):
        required = {"single": 1, "uncertain_bias": 1, "two": 2, "sequential": 2, "correlated": 2}
        if self.game in required and len(self.senders) != required[self.game]:
            raise ValueError(f"game '{self.game}' needs exactly {required[self.game]} sender(s), got {len(self.senders)}")
        if self.game == "many" and len(self.senders) < 2:
            raise ValueError("game 'many' needs at least two senders")
        if len(self.axes) > 2:
            raise ValueError("sweeps take one or two axes")
        return self

    def sender_specs(self, p_overrides=None):
        """SenderSpec per configured sender; p_overrides maps sender index -> p."""
        p_overrides = p_overrides or {}
        return [SenderSpec(p_overrides.get(k, s.p), s.bias) for k, s in enumerate(self.senders)]

    def with_overrides(self, **fields) -> "RunConfig":
        """Copy with solver knobs (seed, threads, tolerance) or `out` replaced; None means keep."""
        solver_fields = {k: v for k, v in fields.items() if k in ("seed", "threads", "tolerance") and v is not None}
        update = {}
        if solver_fields:
            update["solver"] = self.solver.model_copy(update=solver_fields)
        if fields.get("out") is not None:
            update["out"] = fields["out"]
        if fields.get("axes"):
            update["axes"] = fields["axes"]
        return self.model_copy(update=update)


def _format_validation(err: ValidationError, source: str) -> str:
    lines = [f"{source}: invalid configuration"]
    for item in err.errors():
        where = ".".join(str(part) for part in item["loc"])
        if "table" in where:
            # loc is ("model", "table", row, column)
            parts = [p for p in item["loc"] if isinstance(p, int)]
            if parts:
                where = f"model.table row {parts[0]}"
        lines.append(f"  {where}: {item['msg']}")
    return "\n".join(lines)


def env_overrides(environ=None) -> dict:
    """Read DISCLOSURE_SEED / _THREADS / _TOLERANCE / _OUT."""
    environ = os.environ if environ is None else environ
    casts = {"SEED": int, "THREADS": int, "TOLERANCE": float, "OUT": str}
    found = {}
    for key, cast in casts.items():
        raw = environ.get(ENV_PREFIX + key)
        if raw is None or raw == "":
            continue
        try:
            found[key.lower()] = cast(raw)
        except ValueError as e:
            raise ConfigError(f"{ENV_PREFIX}{key}={raw!r}: {e}") from e
    return found


def parse_config(data: dict, source: str = "<config>", environ=None) -> RunConfig:
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_validation(e, source)) from e
    overrides = env_overrides(environ)
    if overrides:
        logger.info(f"env overrides: {overrides}")
        try:
            config = config.with_overrides(**overrides)
            SolverOptions.model_validate(config.solver.model_dump())
        except ValidationError as e:
            raise ConfigError(_format_validation(e, "environment")) from e
    return config


def load_config(path, environ=None) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON (line {e.lineno}, column {e.colno}: {e.msg})") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return parse_config(data, str(path), environ)
