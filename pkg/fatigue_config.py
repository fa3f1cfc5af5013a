"""
Run configuration for the CLI and the HTTP service.

Values come from built-in defaults, updated by an optional JSON file, updated
by command-line flags. ``MUSCLE_FATIGUE_OUTPUT_DIR`` supplies the output
directory when neither the file nor a flag sets one.
"""

import json
import logging
import os
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from fatigue_core import MuscleParams
from validation_stats import FmvcGrid

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "MUSCLE_FATIGUE_OUTPUT_DIR"
DEFAULT_CONFIG_FILE = "config.json"

DEFAULT_CONFIG: Dict[str, Any] = {
    "mvc": 100.0,
    "k": 1.0,
    "muscle_overrides": {},
    "grid": "default",
    "sample_step": 1e-3,
    "ode_step": 1e-3,
    "huijgens_as_printed": False,
    "max_workers": 4,
    "output_dir": None,
    "output_format": "csv",
    "log_level": "WARNING",
    "log_file": None,
}


class MuscleOverride(BaseModel):
    model_config = ConfigDict(frozen=True)

    mvc: Optional[float] = None
    k: Optional[float] = None


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mvc: float = Field(100.0, gt=0, allow_inf_nan=False)
    k: float = Field(1.0, gt=0, allow_inf_nan=False)
    muscle_overrides: Dict[str, MuscleOverride] = Field(default_factory=dict)
    grid: str = "default"
    sample_step: float = Field(1e-3, gt=0, allow_inf_nan=False)
    ode_step: float = Field(1e-3, gt=0, allow_inf_nan=False)
    huijgens_as_printed: bool = False
    max_workers: int = Field(4, ge=1)
    output_dir: Optional[str] = None
    output_format: Literal["csv", "text"] = "csv"
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"
    log_file: Optional[str] = None

    @field_validator("grid")
    @classmethod
    def _grid_parses(cls, v):
        FmvcGrid.from_spec(v)
        return v

    @field_validator("muscle_overrides")
    @classmethod
    def _overrides_valid(cls, v):
        for override in v.values():
            MuscleParams(
                mvc=1.0 if override.mvc is None else override.mvc,
                k=1.0 if override.k is None else override.k,
            )
        return v

    def muscle_params(self, muscle: Optional[str] = None) -> MuscleParams:
        """MuscleParams for the default muscle or a named override."""
        if muscle is None:
            return MuscleParams(mvc=self.mvc, k=self.k)
        if muscle not in self.muscle_overrides:
            raise ValueError(f"no configuration for muscle {muscle!r}")
        override = self.muscle_overrides[muscle]
        return MuscleParams(
            mvc=override.mvc if override.mvc is not None else self.mvc,
            k=override.k if override.k is not None else self.k,
        )

    def fmvc_grid(self) -> FmvcGrid:
        return FmvcGrid.from_spec(self.grid)

    def resolved_output_dir(self) -> str:
        return self.output_dir or os.environ.get(OUTPUT_DIR_ENV) or os.getcwd()


def load_run_config(config_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Defaults, then the JSON file (if it exists), then non-None overrides."""
    config = dict(DEFAULT_CONFIG)
    path = config_file or DEFAULT_CONFIG_FILE
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as f:
            user_config = json.load(f)
        if not isinstance(user_config, dict):
            raise ValueError(f"config file {path} must contain a JSON object")
        config.update(user_config)
        logger.info("Loaded configuration from %s", path)
    elif config_file:
        raise FileNotFoundError(f"config file not found: {config_file}")
    config.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**config)
