from typing import List, Literal, Optional

from pydantic import BaseModel, Field

Group = Literal["general", "shoulder", "elbow", "hand", "back-hip"]


class MuscleInput(BaseModel):
    mvc: float = Field(100.0, gt=0)
    k: float = Field(1.0, gt=0)


class MetInput(MuscleInput):
    model: str = "dynamic"
    fmvc: List[float] = Field(..., min_length=1)
    huijgens_as_printed: bool = False


class MetRow(BaseModel):
    model: str
    f_mvc: float
    met_min: float


class MetOutput(BaseModel):
    rows: List[MetRow]


class SegmentInput(BaseModel):
    duration: float
    load: float


class SimulateInput(MuscleInput):
    segments: List[SegmentInput] = Field(..., min_length=1)
    sample_step: float = Field(0.01, gt=0)


class SimulateOutput(BaseModel):
    t_min: List[float]
    f_load_N: List[float]
    f_cem_N: List[float]
    u_min: List[float]
    overload_samples: int
    first_crossing: Optional[float] = None


class ValidateInput(BaseModel):
    grid: str = "default"
    k: float = Field(1.0, gt=0)
    huijgens_as_printed: bool = False


class ValidationRowOutput(BaseModel):
    model: str
    group: str
    r: Optional[float]
    icc: Optional[float]
    paper_r: Optional[float]
    paper_icc: Optional[float]
    points_used: int
    dropped: List[float] = Field(default_factory=list)
    error: Optional[str] = None


class ValidateOutput(BaseModel):
    grid: List[float]
    rows: List[ValidationRowOutput]


class ModelOutput(BaseModel):
    id: str
    group: str
    name: str
    kind: str
    formula: str
    domain: str


class LiuLimitOutput(BaseModel):
    t: float
    capacity: float
    limit: float
    abs_diff: float
