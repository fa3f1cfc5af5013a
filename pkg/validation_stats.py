"""
Static validation study.

Evaluates the dynamic-model MET against every registered static MET model on a
shared f_MVC grid and reports Pearson r and the one-way ICC per model, with
deltas against the published reference values.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator

from fatigue_errors import UndefinedStatisticError
from fatigue_core import MuscleParams, met
from met_bank import GROUPS, StaticMetModel, list_models, monotonicity_audit

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["model", "group", "r", "icc", "paper_r", "paper_icc", "delta_r", "delta_icc", "points_used"]

DEFAULT_GRID_START = 0.20
DEFAULT_GRID_STOP = 0.95
DEFAULT_GRID_STEP = 0.05


# === Statistics ===
def _paired(a: Sequence[float], b: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(a, dtype=float).reshape(-1)
    y = np.asarray(b, dtype=float).reshape(-1)
    if x.shape != y.shape:
        raise ValueError(f"series lengths differ ({x.size} vs {y.size})")
    if x.size < 2:
        raise ValueError("at least two paired values are required")
    return x, y


def pearson_r(a: Sequence[float], b: Sequence[float]) -> float:
    """Product-moment correlation, clamped to [-1, 1]."""
    x, y = _paired(a, b)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(np.sum(dx * dx)) * float(np.sum(dy * dy)))
    if denom == 0.0:
        raise UndefinedStatisticError("correlation undefined for a constant series")
    return float(np.clip(np.sum(dx * dy) / denom, -1.0, 1.0))


def icc_oneway_matrix(ratings) -> float:
    """One-way single-measure ICC for an (n subjects x p raters) matrix.

    MS_between = p * sum_i (m_i - m)^2 / (n - 1)
    MS_within  = sum_ij (x_ij - m_i)^2 / (n (p - 1))
    ICC        = (MS_between - MS_within) / (MS_between + (p - 1) MS_within)
    """
    x = np.asarray(ratings, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise ValueError(f"ratings must be an n x p matrix with n, p >= 2, got shape {x.shape}")
    n, p = x.shape
    row_means = x.mean(axis=1)
    ms_between = p * float(np.sum((row_means - x.mean()) ** 2)) / (n - 1)
    ms_within = float(np.sum((x - row_means[:, None]) ** 2)) / (n * (p - 1))
    denom = ms_between + (p - 1) * ms_within
    if denom == 0.0:
        raise UndefinedStatisticError("ICC undefined: all values identical")
    return (ms_between - ms_within) / denom


def icc_oneway(a: Sequence[float], b: Sequence[float]) -> float:
    x, y = _paired(a, b)
    return icc_oneway_matrix(np.column_stack([x, y]))


# === Grid ===
class FmvcGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...]

    @field_validator("values")
    @classmethod
    def _check(cls, v):
        if not v:
            raise ValueError("grid must not be empty")
        if any(not (0.0 < f < 1.0) for f in v):
            raise ValueError("grid values must lie in (0, 1)")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("grid values must be strictly increasing")
        return v

    @classmethod
    def from_range(cls, start: float, stop: float, step: float) -> "FmvcGrid":
        if not step > 0:
            raise ValueError(f"grid step must be positive, got {step!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        # rounding keeps 0.2 + 3*0.05 printing as 0.35
        return cls(values=tuple(round(start + i * step, 12) for i in range(count)))

    @classmethod
    def from_spec(cls, spec: str) -> "FmvcGrid":
        """``"default"`` or ``"start:stop:step"``."""
        text = (spec or "default").strip().lower()
        if text == "default":
            return default_grid()
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid spec must be 'default' or 'start:stop:step', got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        return cls.from_range(start, stop, step)

    def __len__(self) -> int:
        return len(self.values)


def default_grid() -> FmvcGrid:
    """f_MVC = 0.20, 0.25, ..., 0.95."""
    return FmvcGrid.from_range(DEFAULT_GRID_START, DEFAULT_GRID_STOP, DEFAULT_GRID_STEP)


# === Report ===
@dataclass(frozen=True)
class ComparisonRow:
    model_id: str
    group: str
    r: float
    icc: float
    paper_r: Optional[float]
    paper_icc: Optional[float]
    points_used: int
    dropped: Tuple[float, ...] = ()
    error: Optional[str] = None

    @property
    def delta_r(self) -> float:
        return self.r - self.paper_r if self.paper_r is not None else math.nan

    @property
    def delta_icc(self) -> float:
        return self.icc - self.paper_icc if self.paper_icc is not None else math.nan


@dataclass(frozen=True)
class ValidationReport:
    grid: FmvcGrid
    params: MuscleParams
    rows: Tuple[ComparisonRow, ...]
    huijgens_as_printed: bool = False

    def row(self, model_id: str) -> ComparisonRow:
        for r in self.rows:
            if r.model_id == model_id:
                return r
        raise KeyError(model_id)

    def to_frame(self) -> pd.DataFrame:
        records = [
            {
                "model": r.model_id,
                "group": r.group,
                "r": r.r,
                "icc": r.icc,
                "paper_r": r.paper_r,
                "paper_icc": r.paper_icc,
                "delta_r": r.delta_r,
                "delta_icc": r.delta_icc,
                "points_used": r.points_used,
            }
            for r in self.rows
        ]
        return pd.DataFrame(records, columns=REPORT_COLUMNS)

    def to_csv(self, path_or_buffer) -> None:
        self.to_frame().to_csv(
            path_or_buffer, index=False, float_format="%.6f", na_rep="nan", lineterminator="\n"
        )

    def to_text(self) -> str:
        frame = self.to_frame()
        return frame.to_string(index=False, float_format=lambda v: f"{v:.6f}", na_rep="nan")

    def group_summary(self, icc_threshold: float = 0.90) -> pd.DataFrame:
        """Per group: model count, ICC count above the threshold, r range."""
        frame = self.to_frame()
        records = []
        for group in GROUPS:
            sub = frame[frame["group"] == group]
            records.append(
                {
                    "group": group,
                    "models": len(sub),
                    "icc_above": int((sub["icc"] > icc_threshold).sum()),
                    "r_min": float(sub["r"].min()),
                    "r_max": float(sub["r"].max()),
                }
            )
        return pd.DataFrame(records)


def _compare(model: StaticMetModel, grid: FmvcGrid, params: MuscleParams) -> ComparisonRow:
    usable = [f for f in grid.values if model.domain.contains(f)]
    dropped = tuple(f for f in grid.values if not model.domain.contains(f))
    if dropped:
        logger.warning("%s: %d grid points outside domain %s dropped", model.id, len(dropped), model.domain)

    def failed(message: str) -> ComparisonRow:
        logger.error("%s: %s", model.id, message)
        return ComparisonRow(model.id, model.group, math.nan, math.nan, model.paper_r, model.paper_icc,
                             len(usable), dropped, message)

    if len(usable) < 2:
        return failed(f"only {len(usable)} grid points inside domain {model.domain}")
    dynamic = [met(params, f) for f in usable]
    static = [model.evaluate(f) for f in usable]
    try:
        r = pearson_r(dynamic, static)
        icc = icc_oneway(dynamic, static)
    except UndefinedStatisticError as e:
        return failed(str(e))
    return ComparisonRow(model.id, model.group, r, icc, model.paper_r, model.paper_icc, len(usable), dropped)


def run_static_validation(
    grid: Optional[FmvcGrid] = None,
    params: Optional[MuscleParams] = None,
    huijgens_as_printed: bool = False,
    max_workers: int = 4,
) -> ValidationReport:
    """Compare the dynamic-model MET with every static model.

    Models are evaluated concurrently; rows come back in table order.
    """
    grid = grid or default_grid()
    params = params or MuscleParams(mvc=100.0)
    models = list_models(huijgens_as_printed=huijgens_as_printed)
    if huijgens_as_printed:
        monotonicity_audit(models)
    logger.info("Static validation over %d models, %d grid points, k=%g", len(models), len(grid), params.k)
    with ThreadPoolExecutor(max_workers=max(1, int(max_workers))) as pool:
        rows = tuple(pool.map(lambda m: _compare(m, grid, params), models))
    return ValidationReport(grid=grid, params=params, rows=rows, huijgens_as_printed=huijgens_as_printed)
