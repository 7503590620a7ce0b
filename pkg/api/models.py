"""
Pydantic models for request/response schemas
"""
from typing import Dict, List

from pydantic import BaseModel, ConfigDict, Field

from controller.pid_controller import ControllerKind, FlowLoopModel, PidGains, ZnUltimate
from harness.metrics import Metrics


# Chemistry Models
class PhResponse(BaseModel):
    """pH of a mixture given by its reaction invariants"""
    alpha: float
    beta: float
    h: float
    ph: float


class TitrationRequest(BaseModel):
    """Base sweep at fixed acid invariant"""
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(ge=0)
    beta_max: float = Field(gt=0)
    steps: int = Field(default=101, ge=2, le=10_001)


class TitrationResponse(BaseModel):
    alpha: float
    beta: List[float]
    ph: List[float]


# Tuning Models
class ZieglerNicholsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ultimate: ZnUltimate
    kind: ControllerKind = "PID"


class UltimateRequest(BaseModel):
    """Probe a flow loop model for its ultimate point"""
    model_config = ConfigDict(extra="forbid")

    flow_loop: FlowLoopModel = FlowLoopModel()
    kind: ControllerKind = "PID"


class TuningResponse(BaseModel):
    ultimate: ZnUltimate
    gains: PidGains


# Experiment Models
class RunResponse(BaseModel):
    """Metrics plus the trace as column arrays"""
    metrics: Metrics
    trace: Dict[str, List[float]]
    rows: int
