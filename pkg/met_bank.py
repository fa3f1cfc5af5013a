"""
Registry of static maximum-endurance-time (MET) models.

Each model maps a relative load f_MVC to an endurance time in minutes for a
body region. Coefficients are stored exactly as published; the reference r
and ICC values against the dynamic model are kept alongside as printed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from fatigue_errors import DomainError, UnknownModelError
from fatigue_core import MuscleParams, NormalizedLoad, met

logger = logging.getLogger(__name__)

Group = Literal["general", "shoulder", "elbow", "hand", "back-hip"]
GROUPS: Tuple[str, ...] = ("general", "shoulder", "elbow", "hand", "back-hip")

Kind = Literal["power-law", "exponential", "rational-polynomial", "shifted-power", "ratio-power"]

CATALOG_COLUMNS = ["id", "group", "name", "kind", "formula", "domain"]


@dataclass(frozen=True)
class Domain:
    """Interval (lower, upper] or (lower, upper) of valid f_MVC."""

    lower: float = 0.0
    upper: float = 1.0
    upper_inclusive: bool = True

    def contains(self, f: float) -> bool:
        if not f > self.lower:
            return False
        return f <= self.upper if self.upper_inclusive else f < self.upper

    def sample(self, points: int) -> np.ndarray:
        """``points`` evenly spaced values strictly inside the open end(s)."""
        values = np.linspace(self.lower, self.upper, points + 1)[1:]
        if not self.upper_inclusive:
            values = np.linspace(self.lower, self.upper, points + 2)[1:-1]
        return values

    def __str__(self) -> str:
        return f"({self.lower:g}, {self.upper:g}{']' if self.upper_inclusive else ')'}"


@dataclass(frozen=True)
class StaticMetModel:
    id: str
    name: str
    group: str
    kind: str
    coefficients: Tuple[float, ...]
    domain: Domain = Domain()
    paper_r: Optional[float] = None
    paper_icc: Optional[float] = None

    def evaluate(self, f: float) -> float:
        c = self.coefficients
        if self.kind == "power-law":
            return c[0] * f ** c[1]
        if self.kind == "exponential":
            return c[0] * math.exp(c[1] * f)
        if self.kind == "rational-polynomial":
            return c[0] + c[1] / f + c[2] / f ** 2 + c[3] / f ** 3
        if self.kind == "shifted-power":
            return c[0] * (f - c[2]) ** c[1]
        if self.kind == "ratio-power":
            return c[0] * ((1.0 - f) / (f - c[2])) ** c[1]
        raise ValueError(f"unknown formula kind {self.kind!r}")

    @property
    def formula(self) -> str:
        c = self.coefficients
        if self.kind == "power-law":
            return f"{c[0]:g}*f^{c[1]:g}"
        if self.kind == "exponential":
            return f"{c[0]:g}*exp({c[1]:g}*f)"
        if self.kind == "rational-polynomial":
            return f"{c[0]:g} + {c[1]:g}/f + {c[2]:g}/f^2 + {c[3]:g}/f^3"
        if self.kind == "shifted-power":
            return f"{c[0]:g}*(f-{c[2]:g})^{c[1]:g}"
        return f"{c[0]:g}*((1-f)/(f-{c[2]:g}))^{c[1]:g}"


def _power(model_id, name, group, a, b, r, icc):
    return StaticMetModel(model_id, name, group, "power-law", (a, b), Domain(), r, icc)


def _exp(model_id, name, group, a, b, r, icc):
    return StaticMetModel(model_id, name, group, "exponential", (a, b), Domain(), r, icc)


HUIJGENS_EXPONENT_AS_PRINTED = -2.4


def build_registry(huijgens_as_printed: bool = False) -> Tuple[StaticMetModel, ...]:
    """All 24 models in table order.

    Huijgens is printed with exponent -2.4, which makes MET grow with load;
    the default registers the sign-corrected +2.4.
    """
    huijgens_exponent = HUIJGENS_EXPONENT_AS_PRINTED if huijgens_as_printed else -HUIJGENS_EXPONENT_AS_PRINTED
    return (
        # General
        StaticMetModel("rohmert-general", "Rohmert", "general", "rational-polynomial",
                       (-1.5, 2.1, -0.6, 0.1), Domain(), 0.9937, 0.8820),
        StaticMetModel("monod-scherrer-general", "Monod and Scherrer", "general", "shifted-power",
                       (0.4167, -2.4, 0.14), Domain(0.14, 1.0), 0.8529, 0.6474),
        StaticMetModel("huijgens-general", "Huijgens", "general", "ratio-power",
                       (0.865, huijgens_exponent, 0.15), Domain(0.15, 1.0, upper_inclusive=False), 0.9964, 0.8800),
        StaticMetModel("sato-general", "Sato et al.", "general", "shifted-power",
                       (0.3802, -1.44, 0.04), Domain(0.04, 1.0), 0.9992, 0.8512),
        _exp("manenica-general", "Manenica", "general", 14.88, -4.48, 0.9927, 0.9796),
        _power("sjogaard-general", "Sjogaard", "general", 0.2997, -2.14, 0.9935, 0.9917),
        _exp("rose-general", "Rose et al.", "general", 7.96, -4.16, 0.9897, 0.7080),
        # Shoulder
        _power("sato-shoulder", "Sato et al.", "shoulder", 0.398, -1.29, 0.9997, 0.7188),
        _power("rohmert-shoulder", "Rohmert et al.", "shoulder", 0.2955, -1.658, 0.9987, 0.5626),
        _exp("mathiassen-ahsberg-shoulder", "Mathiassen and Ahsberg", "shoulder", 40.6092, -9.7, 0.9783, 0.7737),
        _power("garg-shoulder", "Garg", "shoulder", 0.5618, -1.7551, 0.9981, 0.9029),
        # Elbow
        _power("hagberg-elbow", "Hagberg", "elbow", 0.298, -2.14, 0.9935, 0.9921),
        _exp("manenica-elbow", "Manenica", "elbow", 20.6972, -4.5, 0.9929, 0.9271),
        _power("sato-elbow", "Sato et al.", "elbow", 0.195, -2.52, 0.9838, 0.9712),
        _power("rohmert-elbow", "Rohmert et al.", "elbow", 0.2285, -1.391, 0.9997, 0.7189),
        _exp("rose2000-elbow", "Rose et al. 2000", "elbow", 20.6, -6.04, 0.9986, 0.9594),
        _exp("rose1992-elbow", "Rose et al. 1992", "elbow", 10.23, -4.69, 0.9943, 0.7843),
        # Hand
        _exp("manenica-hand", "Manenica", "hand", 16.6099, -4.5, 0.9929, 0.9840),
        # Back/hip
        _exp("manenica-body-pull", "Manenica (body pull)", "back-hip", 27.6604, -4.2, 0.9901, 0.6585),
        _exp("manenica-body-torque", "Manenica (body torque)", "back-hip", 12.4286, -4.3, 0.9911, 0.9447),
        _exp("manenica-back-muscles", "Manenica (back muscles)", "back-hip", 32.7859, -4.9, 0.9957, 0.7306),
        _power("rohmert-posture3", "Rohmert (posture 3)", "back-hip", 0.3001, -2.803, 0.9745, 0.5353),
        _power("rohmert-posture4", "Rohmert (posture 4)", "back-hip", 1.2301, -1.308, 0.9989, 0.7041),
        _power("rohmert-posture5", "Rohmert (posture 5)", "back-hip", 3.2613, -1.256, 0.9984, -0.057),
    )


_REGISTRIES: Dict[bool, Tuple[StaticMetModel, ...]] = {
    False: build_registry(False),
    True: build_registry(True),
}


def list_models(group: Optional[str] = None, huijgens_as_printed: bool = False) -> List[StaticMetModel]:
    """Registered models in table order, optionally restricted to one group."""
    models = _REGISTRIES[bool(huijgens_as_printed)]
    if group is None:
        return list(models)
    if group not in GROUPS:
        raise UnknownModelError(f"unknown group {group!r}; expected one of {', '.join(GROUPS)}")
    return [m for m in models if m.group == group]


def model_ids() -> List[str]:
    return [m.id for m in _REGISTRIES[False]]


def get_model(model_id: str, huijgens_as_printed: bool = False) -> StaticMetModel:
    for model in _REGISTRIES[bool(huijgens_as_printed)]:
        if model.id == model_id:
            return model
    raise UnknownModelError(f"unknown model {model_id!r}; known models: {', '.join(model_ids())}")


def static_met(model: StaticMetModel, f: Union[NormalizedLoad, float]) -> float:
    """Evaluate a static model at f_MVC.

    Raises:
        DomainError: f outside the model domain; ``boundary`` names the
            violated bound.
    """
    value = f.f_mvc if isinstance(f, NormalizedLoad) else float(f)
    dom = model.domain
    if not math.isfinite(value) or not value > dom.lower:
        raise DomainError(f"{model.id}: f_mvc={value!r} must be greater than {dom.lower:g}", boundary=dom.lower)
    if value > dom.upper or (value == dom.upper and not dom.upper_inclusive):
        relation = "at most" if dom.upper_inclusive else "less than"
        raise DomainError(f"{model.id}: f_mvc={value!r} must be {relation} {dom.upper:g}", boundary=dom.upper)
    return model.evaluate(value)


def monotonicity_audit(models: Optional[Iterable[StaticMetModel]] = None, points: int = 100) -> List[str]:
    """Ids of models whose MET is not strictly decreasing over their domain."""
    flagged = []
    for model in (list_models() if models is None else models):
        values = np.array([model.evaluate(f) for f in model.domain.sample(points)])
        if not np.all(np.diff(values) < 0):
            logger.warning("MET model %s is not strictly decreasing over %s", model.id, model.domain)
            flagged.append(model.id)
    return flagged


def catalog_frame(models: Optional[Sequence[StaticMetModel]] = None) -> pd.DataFrame:
    rows = [
        {"id": m.id, "group": m.group, "name": m.name, "kind": m.kind, "formula": m.formula, "domain": str(m.domain)}
        for m in (list_models() if models is None else models)
    ]
    return pd.DataFrame(rows, columns=CATALOG_COLUMNS)


def export_catalog_csv(path_or_buffer, models: Optional[Sequence[StaticMetModel]] = None) -> None:
    catalog_frame(models).to_csv(path_or_buffer, index=False, lineterminator="\n")


def met_curves(
    models: Sequence[StaticMetModel],
    grid: Sequence[float],
    params: Optional[MuscleParams] = None,
) -> pd.DataFrame:
    """Dynamic-model MET and each static model's MET on one f_MVC grid.

    Cells outside a model's domain are NaN.
    """
    params = params or MuscleParams(mvc=100.0)
    frame = pd.DataFrame({"f_mvc": np.asarray(grid, dtype=float)})
    frame["dynamic"] = [met(params, f) for f in frame["f_mvc"]]
    for model in models:
        frame[model.id] = [model.evaluate(f) if model.domain.contains(f) else np.nan for f in frame["f_mvc"]]
    return frame
