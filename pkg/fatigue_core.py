"""
Dynamic muscle fatigue model.

Remaining capacity decays with the load history:

    dF_cem/dt = -k * (F_cem / MVC) * F_load(t)
    F_cem(t)  = MVC * exp(-k * F(t)),    F(t) = integral_0^t F_load(u)/MVC du

and the fatigue index accumulates as

    U(t) = (exp(2k F(t)) - exp(2k F(0))) / (2k)

Times are in minutes, forces in newtons, k in 1/min. Loads are piecewise
constant with half-open segments [start, start + duration), which makes F(t)
exact without quadrature.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from fatigue_errors import DomainError, OutOfRangeError, SaturationError
from numerics import DEFAULT_STEP, OdeSystem, integrate_segments

logger = logging.getLogger(__name__)

# exp(709.78) overflows a double; keep a margin.
EXP_ARGUMENT_CAP = 700.0

TRAJECTORY_COLUMNS = ["t_min", "f_load_N", "f_cem_N", "u_min"]


# === Domain types ===
class MuscleParams(BaseModel):
    """MVC (N) and fatigue rate k (1/min) of one muscle or muscle group."""

    model_config = ConfigDict(frozen=True)

    mvc: float = Field(..., gt=0, allow_inf_nan=False)
    k: float = Field(1.0, gt=0, allow_inf_nan=False)


class LoadSegment(BaseModel):
    model_config = ConfigDict(frozen=True)

    duration: float = Field(..., gt=0, allow_inf_nan=False)
    load: float = Field(..., ge=0, allow_inf_nan=False)


class LoadProfile(BaseModel):
    """Piecewise-constant external load history F_load(t)."""

    model_config = ConfigDict(frozen=True)

    segments: Tuple[LoadSegment, ...]

    @field_validator("segments")
    @classmethod
    def _non_empty(cls, v):
        if not v:
            raise ValueError("load profile needs at least one segment")
        return v

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]]) -> "LoadProfile":
        return cls(segments=tuple(LoadSegment(duration=d, load=l) for d, l in pairs))

    @classmethod
    def constant(cls, duration: float, load: float) -> "LoadProfile":
        return cls.from_pairs([(duration, load)])

    def scaled(self, c: float) -> "LoadProfile":
        return LoadProfile.from_pairs([(s.duration, s.load * c) for s in self.segments])

    @property
    def durations(self) -> np.ndarray:
        return np.array([s.duration for s in self.segments], dtype=float)

    @property
    def loads(self) -> np.ndarray:
        return np.array([s.load for s in self.segments], dtype=float)

    @property
    def starts(self) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(self.durations)[:-1]))

    @property
    def boundaries(self) -> np.ndarray:
        """Segment start times plus the profile end."""
        return np.concatenate(([0.0], np.cumsum(self.durations)))

    @property
    def total_duration(self) -> float:
        return float(np.sum(self.durations))


class NormalizedLoad(BaseModel):
    """f_MVC = %MVC / 100, in (0, 1]."""

    model_config = ConfigDict(frozen=True)

    f_mvc: float = Field(..., gt=0, le=1, allow_inf_nan=False)


@dataclass(frozen=True)
class OverloadWarning:
    """A sample where the requested load exceeds the remaining capacity."""

    t: float
    f_load: float
    f_cem: float


@dataclass(frozen=True, eq=False)
class FatigueTrajectory:
    """Sampled load, capacity F_cem and fatigue index U."""

    t: np.ndarray
    f_load: np.ndarray
    f_cem: np.ndarray
    u: np.ndarray
    params: MuscleParams
    overloads: Tuple[OverloadWarning, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def samples(self) -> List[Tuple[float, float, float, float]]:
        return list(zip(self.t.tolist(), self.f_load.tolist(), self.f_cem.tolist(), self.u.tolist()))

    def first_crossing(self) -> Optional[float]:
        """First sampled time with f_cem <= f_load under a non-zero load."""
        hits = np.nonzero((self.f_load > 0) & (self.f_cem <= self.f_load))[0]
        return float(self.t[hits[0]]) if hits.size else None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t_min": self.t,
                "f_load_N": self.f_load,
                "f_cem_N": self.f_cem,
                "u_min": self.u,
            },
            columns=TRAJECTORY_COLUMNS,
        )


# === Closed-form operations ===
def _as_times(profile: LoadProfile, t) -> np.ndarray:
    times = np.atleast_1d(np.asarray(t, dtype=float))
    total = profile.total_duration
    bad = ~np.isfinite(times) | (times < 0) | (times > total)
    if np.any(bad):
        raise OutOfRangeError(f"t={times[bad][0]!r} outside profile range [0, {total!r}]")
    return times


def _segment_index(profile: LoadProfile, times: np.ndarray) -> np.ndarray:
    # Half-open segments; the profile end belongs to the last segment.
    idx = np.searchsorted(profile.starts, times, side="right") - 1
    return np.clip(idx, 0, len(profile.segments) - 1)


def _normalized_load(profile: LoadProfile, params: MuscleParams, times: np.ndarray) -> np.ndarray:
    rates = profile.loads / params.mvc
    area_before = np.concatenate(([0.0], np.cumsum(profile.durations * rates)[:-1]))
    idx = _segment_index(profile, times)
    return area_before[idx] + (times - profile.starts[idx]) * rates[idx]


def _scalar_or_array(values: np.ndarray, t):
    return float(values[0]) if np.ndim(t) == 0 else values


def cumulative_normalized_load(profile: LoadProfile, params: MuscleParams, t):
    """F(t) = integral_0^t F_load(u)/MVC du, exact for piecewise-constant loads.

    Accepts a scalar or an array of times in [0, total duration].
    """
    times = _as_times(profile, t)
    return _scalar_or_array(_normalized_load(profile, params, times), t)


def load_at(profile: LoadProfile, t):
    times = _as_times(profile, t)
    return _scalar_or_array(profile.loads[_segment_index(profile, times)], t)


def _capacity(params: MuscleParams, cumulative: np.ndarray, times: np.ndarray) -> np.ndarray:
    f_cem = params.mvc * np.exp(-params.k * cumulative)
    under = ~(f_cem > 0)
    if np.any(under):
        raise SaturationError(
            f"capacity underflowed to zero at t={times[under][0]!r}: "
            f"exponent -{params.k * cumulative[under][0]:.1f}"
        )
    return f_cem


def capacity_at(profile: LoadProfile, params: MuscleParams, t):
    """F_cem(t) = MVC * exp(-k F(t)); equals MVC at t = 0.

    Raises:
        SaturationError: F_cem(t) is too small to represent as a positive double.
    """
    times = _as_times(profile, t)
    f_cem = _capacity(params, _normalized_load(profile, params, times), times)
    return _scalar_or_array(f_cem, t)


def _fatigue_index(params: MuscleParams, cumulative: np.ndarray, times: np.ndarray) -> np.ndarray:
    arg = 2.0 * params.k * cumulative
    over = arg > EXP_ARGUMENT_CAP
    if np.any(over):
        raise SaturationError(
            f"fatigue index saturated at t={times[over][0]!r}: "
            f"exponent {arg[over][0]:.1f} exceeds cap {EXP_ARGUMENT_CAP}"
        )
    # F(0) = 0, so the second term of U is 1/(2k); expm1 keeps small U exact.
    return np.expm1(arg) / (2.0 * params.k)


def fatigue_index_at(profile: LoadProfile, params: MuscleParams, t):
    """U(t) in minutes; U(0) = 0 and non-decreasing.

    Raises:
        SaturationError: exp(2k F(t)) would overflow.
    """
    times = _as_times(profile, t)
    u = _fatigue_index(params, _normalized_load(profile, params, times), times)
    return _scalar_or_array(u, t)


def fatigue_index_rate(params: MuscleParams, f_cem: float, f_load: float) -> float:
    """dU/dt = (MVC / F_cem) * (F_load / F_cem)."""
    if not f_cem > 0:
        raise DomainError(f"f_cem must be positive, got {f_cem!r}", boundary=0.0)
    if f_load < 0:
        raise DomainError(f"f_load must be non-negative, got {f_load!r}", boundary=0.0)
    return (params.mvc / f_cem) * (f_load / f_cem)


def capacity_rate(params: MuscleParams, f_cem: float, f_load: float) -> float:
    """dF_cem/dt = -k * (F_cem / MVC) * F_load."""
    return -params.k * (f_cem / params.mvc) * f_load


def _as_fraction(f: Union[NormalizedLoad, float]) -> float:
    value = f.f_mvc if isinstance(f, NormalizedLoad) else float(f)
    if not (0.0 < value <= 1.0) or not math.isfinite(value):
        raise DomainError(f"f_mvc must lie in (0, 1], got {value!r}", boundary=0.0 if value <= 0 else 1.0)
    return value


def met(params: MuscleParams, f: Union[NormalizedLoad, float]) -> float:
    """Maximum endurance time -ln(f)/(k f) in minutes."""
    value = _as_fraction(f)
    # -0.0 at f = 1
    return abs(-math.log(value) / (params.k * value))


def met_from_load(params: MuscleParams, f_load: float) -> float:
    return met(params, f_load / params.mvc)


# === Sampling and ODE cross-check ===
def trajectory(profile: LoadProfile, params: MuscleParams, sample_step: float = DEFAULT_STEP) -> FatigueTrajectory:
    """Sample F_cem and U on a uniform grid plus every segment boundary."""
    if not (sample_step > 0 and math.isfinite(sample_step)):
        raise ValueError(f"sample_step must be positive, got {sample_step!r}")

    total = profile.total_duration
    n = int(math.floor(total / sample_step * (1.0 + 1e-12)))
    grid = sample_step * np.arange(n + 1, dtype=float)
    bounds = profile.boundaries
    # grid points within rounding of a boundary give way to the boundary itself
    pos = np.clip(np.searchsorted(bounds, grid), 1, len(bounds) - 1)
    nearest = np.minimum(np.abs(grid - bounds[pos - 1]), np.abs(grid - bounds[pos]))
    grid = grid[(nearest > sample_step * 1e-9) & (grid < total)]
    times = np.union1d(grid, bounds)

    cumulative = _normalized_load(profile, params, times)
    f_cem = _capacity(params, cumulative, times)
    u = _fatigue_index(params, cumulative, times)
    f_load = profile.loads[_segment_index(profile, times)]

    over = np.nonzero(f_load > f_cem)[0]
    overloads = tuple(OverloadWarning(float(times[i]), float(f_load[i]), float(f_cem[i])) for i in over)
    if overloads:
        logger.warning(
            "Load exceeds remaining capacity in %d of %d samples (first at t=%.6f min)",
            len(overloads), len(times), overloads[0].t,
        )
    return FatigueTrajectory(t=times, f_load=f_load, f_cem=f_cem, u=u, params=params, overloads=overloads)


def capacity_system(params: MuscleParams, load: float) -> OdeSystem:
    """Capacity ODE for one constant-load segment."""
    return OdeSystem(1, lambda t, y: [capacity_rate(params, y[0], load)])


def simulate_capacity(profile: LoadProfile, params: MuscleParams, h: float = DEFAULT_STEP) -> List[Tuple[float, float]]:
    """RK4 integration of the capacity ODE, restarted at each segment boundary."""
    pieces = [(s.duration, capacity_system(params, s.load)) for s in profile.segments]
    samples = integrate_segments(pieces, [params.mvc], 0.0, h)
    return [(t, float(y[0])) for t, y in samples]
