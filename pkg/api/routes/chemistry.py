"""
Chemistry API routes
"""
import numpy as np
from fastapi import APIRouter, HTTPException, Query

from api.models import PhResponse, TitrationRequest, TitrationResponse
from model.chemistry import IonInvariants, default_constants, hydrogen_ion, titration_curve
from utility.errors import PhSimError

router = APIRouter(prefix="/api/chemistry", tags=["chemistry"])


@router.get("/ph", response_model=PhResponse)
async def get_ph(alpha: float = Query(ge=0), beta: float = Query(ge=0)):
    """
    Equilibrium [H+] and pH of a mixture
    """
    try:
        h = hydrogen_ion(IonInvariants(alpha=alpha, beta=beta), default_constants())
        return PhResponse(alpha=alpha, beta=beta, h=h, ph=-float(np.log10(h)))
    except PhSimError as e:
        raise HTTPException(status_code=500, detail=f"Error solving for pH: {str(e)}")


@router.post("/titrate", response_model=TitrationResponse)
async def titrate(request: TitrationRequest):
    """
    Steady titration curve at fixed acid invariant
    """
    try:
        betas = np.linspace(0.0, request.beta_max, request.steps)
        curve = titration_curve(request.alpha, list(betas), default_constants())
        return TitrationResponse(
            alpha=request.alpha,
            beta=[b for b, _ in curve],
            ph=[p for _, p in curve],
        )
    except PhSimError as e:
        raise HTTPException(status_code=500, detail=f"Error computing titration curve: {str(e)}")
