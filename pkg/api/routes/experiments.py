"""
Experiment API routes
"""
import logging

from fastapi import APIRouter, HTTPException

from api.models import RunResponse
from harness.config import ExperimentConfig
from harness.experiments import PRESETS
from harness.metrics import compute_metrics
from harness.runner import run_experiment
from utility.errors import PhSimError, StateDiverged

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/experiments", tags=["experiments"])


@router.get("/presets/{name}", response_model=ExperimentConfig)
async def get_preset(name: str):
    """
    Preset config (exp1, exp2, exp3, exp3-fuzzy)
    """
    if name not in PRESETS:
        raise HTTPException(status_code=404, detail=f"Unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name]()


@router.post("/run", response_model=RunResponse)
def run(cfg: ExperimentConfig):
    """
    Simulate a config and return its metrics and trace columns
    """
    try:
        trace = run_experiment(cfg, name="api")
        metrics = compute_metrics(trace, cfg.schedule)
    except StateDiverged as e:
        logger.error("run diverged: %s", e)
        raise HTTPException(status_code=500, detail=f"Simulation diverged: {str(e)}")
    except PhSimError as e:
        raise HTTPException(status_code=422, detail=f"Error running experiment: {str(e)}")
    return RunResponse(metrics=metrics, trace=trace.to_dict(), rows=len(trace))
