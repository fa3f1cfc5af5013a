"""
Reference fatigue models used to check the dynamic model.

- Liu motor-unit model (times in seconds, rates in 1/s):
      dM_A/dt = B M_uc - F M_A + R M_F
      dM_F/dt = F M_A - R M_F
      M_uc    = M_0 - M_A - M_F
  with beta = B/F and gamma = R/F. With gamma = 0 and beta -> infinity the
  non-fatigued fraction (M_A + M_uc)/M_0 reduces to exp(-F t).
- Freund-Takala capacity reservoir (times in minutes):
      dS0/dt = beta_recovery (S_l - S0) - beta_decay S(t)

Unit conversion between seconds and minutes happens only in
``dynamic_capacity_curve``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Literal, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from fatigue_errors import DegenerateClosedFormError, GridMismatchError, OutOfRangeError, UndefinedStatisticError
from fatigue_core import LoadProfile, MuscleParams, capacity_at
from numerics import DEFAULT_STEP, OdeSystem, integrate_segments, rk4_integrate, step_times
from validation_stats import pearson_r

logger = logging.getLogger(__name__)

SECONDS_PER_MINUTE = 60.0
# |beta - 1 - gamma| below this is treated as the degenerate closed form
DEGENERACY_TOLERANCE = 1e-12


# === Liu motor-unit model ===
class LiuParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    m0: float = Field(1.0, gt=0, allow_inf_nan=False)
    f_rate: float = Field(..., gt=0, allow_inf_nan=False)
    r_rate: float = Field(0.0, ge=0, allow_inf_nan=False)
    b_rate: float = Field(..., ge=0, allow_inf_nan=False)

    @classmethod
    def from_ratios(cls, f_rate: float, beta: float, gamma: float = 0.0, m0: float = 1.0) -> "LiuParams":
        return cls(m0=m0, f_rate=f_rate, r_rate=gamma * f_rate, b_rate=beta * f_rate)

    @property
    def beta(self) -> float:
        return self.b_rate / self.f_rate

    @property
    def gamma(self) -> float:
        return self.r_rate / self.f_rate

    @property
    def is_degenerate(self) -> bool:
        return abs(self.beta - 1.0 - self.gamma) < DEGENERACY_TOLERANCE


@dataclass(frozen=True)
class LiuState:
    m_a: float
    m_f: float
    m_uc: float


def liu_closed_form(params: LiuParams, t: float) -> Tuple[float, float]:
    """(M_A/M_0, M_uc/M_0) at t seconds from a fully rested start.

    Raises:
        DegenerateClosedFormError: beta == 1 + gamma; use ``liu_simulate``.
    """
    if t < 0:
        raise OutOfRangeError(f"t must be non-negative, got {t!r}")
    if params.is_degenerate:
        raise DegenerateClosedFormError(
            f"beta - 1 - gamma = 0 (beta={params.beta!r}, gamma={params.gamma!r}); use liu_simulate instead"
        )
    beta, gamma, f = params.beta, params.gamma, params.f_rate
    denom = beta - 1.0 - gamma
    uc = math.exp(-beta * f * t)
    a = (
        gamma / (1.0 + gamma)
        + beta / ((1.0 + gamma) * denom) * math.exp(-(1.0 + gamma) * f * t)
        - (beta - gamma) / denom * uc
    )
    return a, uc


def liu_capacity_closed_form(params: LiuParams, t: float) -> float:
    """Non-fatigued fraction (M_A + M_uc)/M_0."""
    a, uc = liu_closed_form(params, t)
    return a + uc


def liu_system(params: LiuParams) -> OdeSystem:
    def field(t, y):
        m_a, m_f = y
        m_uc = params.m0 - m_a - m_f
        return [
            params.b_rate * m_uc - params.f_rate * m_a + params.r_rate * m_f,
            params.f_rate * m_a - params.r_rate * m_f,
        ]

    return OdeSystem(2, field)


def liu_simulate(params: LiuParams, t1: float, h: float = DEFAULT_STEP) -> List[Tuple[float, LiuState]]:
    """RK4 trajectory of (M_A, M_F) from (0, 0); M_uc follows from conservation."""
    samples = rk4_integrate(liu_system(params), [0.0, 0.0], 0.0, t1, h)
    return [(t, LiuState(float(y[0]), float(y[1]), float(params.m0 - y[0] - y[1]))) for t, y in samples]


def liu_limit_capacity(f_rate: float, t: float) -> float:
    """exp(-F t): the gamma = 0, beta -> infinity limit of (M_A + M_uc)/M_0."""
    if t < 0:
        raise OutOfRangeError(f"t must be non-negative, got {t!r}")
    return math.exp(-f_rate * t)


# === Freund-Takala reservoir ===
class FreundTakalaParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    s_limit: float = Field(..., gt=0, allow_inf_nan=False)
    beta_decay: float = Field(1.0, ge=0, allow_inf_nan=False)
    beta_recovery: float = Field(1.0, ge=0, allow_inf_nan=False)


ForceInput = Union[float, LoadProfile, Callable[[float], float]]


def _force_pieces(params: FreundTakalaParams, load: ForceInput, t1: float) -> List[Tuple[float, OdeSystem]]:
    def system(force: Callable[[float], float]) -> OdeSystem:
        return OdeSystem(1, lambda t, y: [params.beta_recovery * (params.s_limit - y[0]) - params.beta_decay * force(t)])

    if isinstance(load, LoadProfile):
        if t1 > load.total_duration:
            raise OutOfRangeError(f"horizon {t1!r} exceeds profile duration {load.total_duration!r}")
        pieces = []
        start = 0.0
        for segment in load.segments:
            if start >= t1:
                break
            duration = min(segment.duration, t1 - start)
            pieces.append((duration, system(lambda t, s=segment.load: s)))
            start += segment.duration
        return pieces
    if callable(load):
        return [(t1, system(load))]
    value = float(load)
    return [(t1, system(lambda t: value))]


def freund_takala_simulate(
    params: FreundTakalaParams,
    load: ForceInput,
    s0_init: float,
    t1: float,
    h: float = DEFAULT_STEP,
) -> List[Tuple[float, float]]:
    """RK4 trajectory of the capacity S0(t) in minutes.

    ``load`` is a constant force, a piecewise-constant profile (its segment
    boundaries become step endpoints) or a callable S(t). Values leaving
    [0, s_limit] are returned unchanged and logged as a warning.
    """
    if not 0.0 <= s0_init <= params.s_limit:
        raise ValueError(f"s0_init must lie in [0, {params.s_limit!r}], got {s0_init!r}")
    samples = integrate_segments(_force_pieces(params, load, t1), [s0_init], 0.0, h)
    out = [(t, float(y[0])) for t, y in samples]
    outside = [t for t, s in out if s < 0.0 or s > params.s_limit]
    if outside:
        logger.warning(
            "Freund-Takala capacity left [0, %g] in %d samples (first at t=%.6f)",
            params.s_limit, len(outside), outside[0],
        )
    return out


# === Curve comparison ===
@dataclass(frozen=True, eq=False)
class SampledCurve:
    times: np.ndarray
    values: np.ndarray
    time_unit: str = "s"
    label: str = "value"

    def __post_init__(self):
        if np.shape(self.times) != np.shape(self.values):
            raise ValueError("times and values must have the same length")

    @classmethod
    def from_samples(cls, samples, time_unit: str = "s", label: str = "value") -> "SampledCurve":
        times, values = zip(*samples)
        return cls(np.asarray(times, dtype=float), np.asarray(values, dtype=float), time_unit, label)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({f"t_{self.time_unit}": self.times, self.label: self.values})

    def to_csv(self, path_or_buffer) -> None:
        self.to_frame().to_csv(path_or_buffer, index=False, float_format="%.6f", lineterminator="\n")


@dataclass(frozen=True)
class CurveComparison:
    max_abs_diff: float
    pearson_r: float


def compare_capacity_curves(a: SampledCurve, b: SampledCurve) -> CurveComparison:
    """Max absolute difference and Pearson r over a shared time grid."""
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0.0, atol=1e-9):
        raise GridMismatchError("curves must share the same time grid")
    diff = float(np.max(np.abs(a.values - b.values)))
    if np.array_equal(a.values, b.values):
        # identical curves correlate perfectly even when pearson_r cannot be formed
        return CurveComparison(diff, 1.0)
    try:
        r = pearson_r(a.values, b.values)
    except UndefinedStatisticError as e:
        logger.warning("Curve correlation undefined: %s", e)
        r = math.nan
    return CurveComparison(diff, r)


def liu_curve(
    params: LiuParams,
    t1: float,
    h: float = DEFAULT_STEP,
    method: Literal["closed-form", "ode"] = "closed-form",
) -> SampledCurve:
    """(M_A + M_uc)/M_0 sampled every h seconds up to t1."""
    if method == "closed-form" and params.is_degenerate:
        logger.info("Liu closed form degenerate for beta=%g, gamma=%g; integrating the ODE", params.beta, params.gamma)
        method = "ode"
    if method == "ode":
        samples = [(t, (s.m_a + s.m_uc) / params.m0) for t, s in liu_simulate(params, t1, h)]
    elif method == "closed-form":
        if not (h > 0 and t1 > 0):
            raise ValueError(f"need t1 > 0 and h > 0 (t1={t1!r}, h={h!r})")
        times = step_times(0.0, t1, h).tolist()
        samples = [(t, liu_capacity_closed_form(params, t)) for t in times]
    else:
        raise ValueError(f"unknown method {method!r}")
    return SampledCurve.from_samples(samples, "s", "reference")


def freund_takala_curve(
    params: FreundTakalaParams,
    load: ForceInput,
    s0_init: float,
    t1: float,
    h: float = DEFAULT_STEP,
) -> SampledCurve:
    """S0/S_l sampled in minutes."""
    samples = freund_takala_simulate(params, load, s0_init, t1, h)
    return SampledCurve.from_samples([(t, s / params.s_limit) for t, s in samples], "min", "reference")


def dynamic_capacity_curve(times_s: np.ndarray, f_rate: float) -> SampledCurve:
    """Dynamic-model capacity F_cem/MVC under maximum effort (C = 1).

    The Liu fatigue rate in 1/s maps to k = 60 * f_rate in 1/min.
    """
    times_s = np.asarray(times_s, dtype=float)
    params = MuscleParams(mvc=1.0, k=f_rate * SECONDS_PER_MINUTE)
    profile = LoadProfile.constant(float(times_s[-1]) / SECONDS_PER_MINUTE, params.mvc)
    minutes = np.minimum(times_s / SECONDS_PER_MINUTE, profile.total_duration)
    return SampledCurve(times_s, capacity_at(profile, params, minutes) / params.mvc, "s", "dynamic")


def dynamic_capacity_under_profile(times_min: np.ndarray, params: MuscleParams, profile: LoadProfile) -> SampledCurve:
    """Dynamic-model F_cem/MVC on a minute grid for an arbitrary profile."""
    times_min = np.asarray(times_min, dtype=float)
    return SampledCurve(times_min, capacity_at(profile, params, times_min) / params.mvc, "min", "dynamic")
