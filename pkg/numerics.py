"""
Fixed-step ODE integration and finite differences.

Used to cross-check the closed-form fatigue model and to simulate the
Liu and Freund-Takala reference models. Everything here is a pure function.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from fatigue_errors import IntegrationError

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3

VectorField = Callable[[float, np.ndarray], Sequence[float]]
Sample = Tuple[float, np.ndarray]


@dataclass(frozen=True)
class OdeSystem:
    """dy/dt = vector_field(t, y) with y of length ``dimension``."""

    dimension: int
    vector_field: VectorField

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension!r}")

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        dy = np.asarray(self.vector_field(t, y), dtype=float).reshape(-1)
        if dy.shape != (self.dimension,):
            raise IntegrationError(
                f"vector field returned {dy.shape[0]} components, expected {self.dimension}", t
            )
        if not np.all(np.isfinite(dy)):
            raise IntegrationError("non-finite derivative", t)
        return dy


def rk4_step(system: OdeSystem, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = system.derivative(t, y)
    k2 = system.derivative(t + h / 2.0, y + h * k1 / 2.0)
    k3 = system.derivative(t + h / 2.0, y + h * k2 / 2.0)
    k4 = system.derivative(t + h, y + h * k3)
    return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def step_times(t0: float, t1: float, h: float) -> np.ndarray:
    # Uniform grid t0 + i*h; the last step is shortened to land on t1.
    span = t1 - t0
    n_full = int(math.floor(span / h * (1.0 + 1e-12)))
    times = t0 + h * np.arange(n_full + 1, dtype=float)
    if t1 - times[-1] > h * 1e-9:
        times = np.append(times, t1)
    else:
        times[-1] = t1
    return times


def rk4_integrate(
    system: OdeSystem,
    y0: Sequence[float],
    t0: float,
    t1: float,
    h: float = DEFAULT_STEP,
) -> List[Sample]:
    """Classical 4th-order Runge-Kutta from t0 to t1, sampled every h.

    Args:
        system: the ODE.
        y0: initial state, length ``system.dimension``.
        t0, t1: integration interval, t1 > t0.
        h: step; the final partial step is shortened to end exactly on t1.

    Returns:
        List of (t, state) pairs starting with (t0, y0).

    Raises:
        ValueError: bad interval or step.
        IntegrationError: the vector field returned a non-finite value.
    """
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"step must be positive and finite, got {h!r}")
    if not (t1 > t0):
        raise ValueError(f"t1 must be greater than t0 (t0={t0!r}, t1={t1!r})")

    y = np.asarray(y0, dtype=float).reshape(-1).copy()
    if y.shape != (system.dimension,):
        raise ValueError(f"initial state has {y.shape[0]} components, expected {system.dimension}")

    times = step_times(t0, t1, h)
    samples: List[Sample] = [(float(times[0]), y.copy())]
    for i in range(1, len(times)):
        t_prev = float(times[i - 1])
        y = rk4_step(system, t_prev, y, float(times[i]) - t_prev)
        samples.append((float(times[i]), y.copy()))
    return samples


def integrate_segments(
    pieces: Sequence[Tuple[float, OdeSystem]],
    y0: Sequence[float],
    t0: float = 0.0,
    h: float = DEFAULT_STEP,
) -> List[Sample]:
    """Chain RK4 over consecutive (duration, system) pieces.

    Each piece restarts from the previous end state so that a discontinuity
    in the vector field is never straddled by a step.
    """
    if not pieces:
        raise ValueError("at least one piece is required")
    samples: List[Sample] = []
    state = np.asarray(y0, dtype=float)
    start = float(t0)
    for duration, system in pieces:
        end = start + float(duration)
        piece = rk4_integrate(system, state, start, end, h)
        # drop the duplicated boundary sample
        samples.extend(piece if not samples else piece[1:])
        state = piece[-1][1]
        start = end
    logger.debug("Integrated %d pieces, %d samples", len(pieces), len(samples))
    return samples


def central_difference(f: Callable[[float], float], t: float, h: float) -> float:
    """(f(t+h) - f(t-h)) / (2h)."""
    if not h > 0:
        raise ValueError(f"h must be positive, got {h!r}")
    return (f(t + h) - f(t - h)) / (2.0 * h)
