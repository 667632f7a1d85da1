import datetime
from typing import List, Optional

from pydantic import BaseModel, Field

from gatecat.requests import GateKind


class RunSummarySchema(BaseModel):
    id: int
    config_hash: str
    command: str
    tool_version: str
    created_at: datetime.datetime

    class Config:
        from_attributes = True


class RunDetailSchema(RunSummarySchema):
    payload: dict


class RunListResponseSchema(BaseModel):
    runs: List[RunSummarySchema]
    prev_page: Optional[str] = None
    next_page: Optional[str] = None
    total_pages: int
    total_items: int


class SpectrumRequestSchema(BaseModel):
    u_prime: float = Field(ge=0)
    n_levels: int = Field(default=64, ge=8, le=256)
    method: str = Field(default="exact", pattern="^(exact|matrix)$")
    check_convergence: bool = True


class SpectrumResponseSchema(BaseModel):
    u_prime: float
    method: str
    energies: List[float]
    anharmonicity: float
    omega_tilde_over_omega_x: float
    omega_tilde_prime_over_omega_x: float
    coefficients: dict


class LayoutSolveRequestSchema(BaseModel):
    positions: List[float] = Field(min_length=1)
    symmetric: bool = False
    k_max: int = Field(default=5, ge=1)
    name: str = "layout"


class LayoutSolveResponseSchema(BaseModel):
    name: str
    base_depths_over_V0: List[float]
    static_amplitudes: List[float]
    condition_number: float


class GatePlanRequestSchema(BaseModel):
    kind: GateKind
    magnitude: float = Field(ge=0)
    lam: float = Field(gt=0, lt=1)
    theta: float = 0.0
    phi: float = 0.0
    u_prime: Optional[float] = Field(default=None, ge=0)
    layout: Optional[str] = None
    corrections: bool = True


class GatePlanResponseSchema(BaseModel):
    plan: dict
    lam: float
    tau: float
    time_us: float
    parameter: List[float]
    modulation_limit: Optional[float] = None
    min_depth_over_V0: float
