"""
Controller tuning API routes
"""
from fastapi import APIRouter, HTTPException

from api.models import TuningResponse, UltimateRequest, ZieglerNicholsRequest
from controller.pid_controller import find_ultimate, p_only_probe, zn_tune
from utility.errors import NoOscillation

router = APIRouter(prefix="/api/tuning", tags=["tuning"])


@router.post("/ziegler-nichols", response_model=TuningResponse)
async def ziegler_nichols(request: ZieglerNicholsRequest):
    """
    Gains from a known ultimate gain and period
    """
    return TuningResponse(ultimate=request.ultimate, gains=zn_tune(request.ultimate, request.kind))


@router.post("/ultimate", response_model=TuningResponse)
def ultimate(request: UltimateRequest):
    """
    Probe a flow loop model for its ultimate point, then tune
    """
    try:
        u = find_ultimate(p_only_probe(request.flow_loop))
    except NoOscillation as e:
        raise HTTPException(status_code=422, detail=f"No sustained oscillation: {str(e)}")
    return TuningResponse(ultimate=u, gains=zn_tune(u, request.kind))
