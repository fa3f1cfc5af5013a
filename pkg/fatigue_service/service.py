import math
from typing import Dict, List, Optional

from fastapi import APIRouter, Query

from fatigue_core import LoadProfile, MuscleParams, met, trajectory
from met_bank import get_model, list_models, monotonicity_audit, static_met
from reference_models import LiuParams, liu_capacity_closed_form, liu_limit_capacity
from validation_stats import FmvcGrid, run_static_validation

from .schemas import (
    Group,
    LiuLimitOutput,
    MetInput,
    MetOutput,
    MetRow,
    ModelOutput,
    SimulateInput,
    SimulateOutput,
    ValidateInput,
    ValidateOutput,
    ValidationRowOutput,
)

VERSION = "1.0"

router = APIRouter()


def _finite_or_none(value: float) -> Optional[float]:
    return None if value is None or math.isnan(value) else value


@router.get("/health")
def health() -> Dict[str, str]:
    return {"status": "ok", "version": VERSION}


@router.get("/models", response_model=List[ModelOutput])
def models(group: Optional[Group] = None, huijgens_as_printed: bool = False) -> List[ModelOutput]:
    return [
        ModelOutput(id=m.id, group=m.group, name=m.name, kind=m.kind, formula=m.formula, domain=str(m.domain))
        for m in list_models(group, huijgens_as_printed)
    ]


@router.post("/met", response_model=MetOutput)
def met_endpoint(payload: MetInput) -> MetOutput:
    if payload.model == "dynamic":
        params = MuscleParams(mvc=payload.mvc, k=payload.k)
        values = [met(params, f) for f in payload.fmvc]
    else:
        model = get_model(payload.model, payload.huijgens_as_printed)
        if payload.huijgens_as_printed:
            monotonicity_audit([model])
        values = [static_met(model, f) for f in payload.fmvc]
    return MetOutput(rows=[MetRow(model=payload.model, f_mvc=f, met_min=v) for f, v in zip(payload.fmvc, values)])


@router.post("/simulate", response_model=SimulateOutput)
def simulate(payload: SimulateInput) -> SimulateOutput:
    profile = LoadProfile.from_pairs([(s.duration, s.load) for s in payload.segments])
    traj = trajectory(profile, MuscleParams(mvc=payload.mvc, k=payload.k), payload.sample_step)
    return SimulateOutput(
        t_min=traj.t.tolist(),
        f_load_N=traj.f_load.tolist(),
        f_cem_N=traj.f_cem.tolist(),
        u_min=traj.u.tolist(),
        overload_samples=len(traj.overloads),
        first_crossing=traj.first_crossing(),
    )


@router.post("/validate-static", response_model=ValidateOutput)
def validate_static(payload: ValidateInput) -> ValidateOutput:
    grid = FmvcGrid.from_spec(payload.grid)
    report = run_static_validation(
        grid=grid,
        params=MuscleParams(mvc=100.0, k=payload.k),
        huijgens_as_printed=payload.huijgens_as_printed,
    )
    rows = [
        ValidationRowOutput(
            model=r.model_id,
            group=r.group,
            r=_finite_or_none(r.r),
            icc=_finite_or_none(r.icc),
            paper_r=r.paper_r,
            paper_icc=r.paper_icc,
            points_used=r.points_used,
            dropped=list(r.dropped),
            error=r.error,
        )
        for r in report.rows
    ]
    return ValidateOutput(grid=list(grid.values), rows=rows)


@router.get("/liu-limit", response_model=LiuLimitOutput)
def liu_limit(
    t: float = Query(..., ge=0),
    f_rate: float = Query(1.0, gt=0),
    beta: float = Query(1000.0, ge=0),
    gamma: float = Query(0.0, ge=0),
) -> LiuLimitOutput:
    """Liu non-fatigued fraction next to its exp(-F t) limit."""
    capacity = liu_capacity_closed_form(LiuParams.from_ratios(f_rate=f_rate, beta=beta, gamma=gamma), t)
    limit = liu_limit_capacity(f_rate, t)
    return LiuLimitOutput(t=t, capacity=capacity, limit=limit, abs_diff=abs(capacity - limit))
