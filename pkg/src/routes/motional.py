import math

from fastapi import APIRouter, Depends, HTTPException, Query
from sqlalchemy.ext.asyncio import AsyncSession
from starlette import status

from beamforge.coefficients import build_coeff_matrix
from beamforge.depths import base_depths_for, modulation_limit
from beamforge.geometry import BeamGeometry, TrapLayout
from config import get_settings
from database import RunStore, get_db
from exceptions import SimulationError
from gatecat.requests import GateRequest
from gatecat.runner import GateContext, compile_gate
from relmode.elements import spectrum_export
from relmode.spectrum import diagonalize_relative
from schemas.motional import (
    GatePlanRequestSchema,
    GatePlanResponseSchema,
    LayoutSolveRequestSchema,
    LayoutSolveResponseSchema,
    RunDetailSchema,
    RunListResponseSchema,
    RunSummarySchema,
    SpectrumRequestSchema,
    SpectrumResponseSchema
)

router = APIRouter()


def simulation_failure(error: SimulationError) -> HTTPException:
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(error))


def get_pagination_params(
        page: int = Query(1, ge=1),
        per_page: int = Query(10, ge=1, le=20)
):
    return {"page": page, "per_page": per_page}


@router.get("/runs/", response_model=RunListResponseSchema)
async def get_list_runs(
        pagination: dict = Depends(get_pagination_params),
        db: AsyncSession = Depends(get_db)
):
    page = pagination["page"]
    per_page = pagination["per_page"]

    store = RunStore(db)
    runs = await store.page(offset=(page - 1) * per_page, limit=per_page)
    if not runs:
        raise HTTPException(status_code=404, detail="No runs found.")

    total_items = await store.count()
    total_pages = (total_items + per_page - 1) // per_page

    root_url = "/api/v1/motional/"
    return {
        "runs": [RunSummarySchema.model_validate(run) for run in runs],
        "prev_page": f"{root_url}runs/?page={page - 1}&per_page={per_page}" if page > 1 else None,
        "next_page": f"{root_url}runs/?page={page + 1}&per_page={per_page}" if page < total_pages else None,
        "total_pages": total_pages,
        "total_items": total_items
    }


@router.get("/runs/{config_hash}/", response_model=RunDetailSchema)
async def get_run_by_hash(config_hash: str, db: AsyncSession = Depends(get_db)):
    run = await RunStore(db).get(config_hash)
    if not run:
        raise HTTPException(status_code=404, detail="Run with the given hash was not found.")
    return run


@router.post("/spectrum/", response_model=SpectrumResponseSchema)
def compute_spectrum(body: SpectrumRequestSchema):
    settings = get_settings()
    try:
        spectrum = diagonalize_relative(body.u_prime, body.n_levels, method=body.method,
                                        n_expansion=max(settings.N_EXPANSION, 4 * body.n_levels),
                                        check_convergence=body.check_convergence)
    except SimulationError as e:
        raise simulation_failure(e)
    return spectrum_export(spectrum)


@router.post("/layouts/solve/", response_model=LayoutSolveResponseSchema)
def solve_layout(body: LayoutSolveRequestSchema):
    geometry = BeamGeometry.from_settings(get_settings())
    try:
        layout = TrapLayout(positions=tuple(body.positions), k_max=body.k_max, symmetric=body.symmetric,
                            name=body.name)
        depths = base_depths_for(layout, geometry)
        matrix = build_coeff_matrix(layout, geometry)
    except SimulationError as e:
        raise simulation_failure(e)
    return {
        "name": layout.name,
        "base_depths_over_V0": [float(u) for u in depths],
        "static_amplitudes": [float(v) for v in matrix.amplitudes(depths)],
        "condition_number": matrix.condition_number,
    }


@router.post("/gates/plan/", response_model=GatePlanResponseSchema)
def plan_gate(body: GatePlanRequestSchema):
    context = GateContext(settings=get_settings())
    try:
        request = GateRequest(kind=body.kind, magnitude=body.magnitude, theta=body.theta, phi=body.phi,
                              lam=body.lam, u_prime=body.u_prime, layout=body.layout,
                              corrections=body.corrections)
        compiled = compile_gate(request, context, check=False)
    except SimulationError as e:
        raise simulation_failure(e)
    schedule = compiled.schedule
    depths = schedule.depths(schedule.time_grid())
    limit = modulation_limit(schedule)
    return {
        "plan": compiled.plan.to_dict(),
        "lam": compiled.lam,
        "tau": compiled.tau,
        "time_us": compiled.tau / context.geometry.omega_x * 1e6,
        "parameter": [compiled.parameter.real, compiled.parameter.imag],
        "modulation_limit": limit if math.isfinite(limit) else None,
        "min_depth_over_V0": float(depths.min()),
    }
