"""
Mixer tank dynamics, valve actuators and sensors

The tank is a perfectly mixed vessel fed by an acid stream (F1, C1) and a base
stream (F2, C2). Its state is the reaction-invariant pair, which evolves linearly:

    V dalpha/dt = F1 C1 - (F1 + F2) alpha
    V dbeta/dt  = F2 C2 - (F1 + F2) beta
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from model.chemistry import EquilibriumConstants, IonInvariants, ph_of
from utility.errors import StateDiverged

logger = logging.getLogger(__name__)

# RK4 may undershoot zero by roundoff only
NEGATIVE_TOLERANCE = 1e-15


class PlantParams(BaseModel):
    """Tank and feed parameters"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    volume: float = Field(default=0.8, gt=0)  # L
    c1: float = Field(default=0.052, ge=0)  # acid feed, mol/L
    c2: float = Field(default=0.052, ge=0)  # base feed, mol/L
    f_max: float = Field(default=0.05, gt=0)  # per stream, L/s
    constants: EquilibriumConstants = EquilibriumConstants()
    ph_noise_sigma: float = Field(default=0.0, ge=0)


class ValveModel(BaseModel):
    """Asymmetric first-order valve with direction-dependent gain error"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    tau_open: float = Field(default=8.0, gt=0)  # s
    tau_close: float = Field(default=5.0, gt=0)  # s
    hysteresis_eps: float = Field(default=0.04, ge=0, le=0.06)


class PlantState(BaseModel):
    model_config = ConfigDict(frozen=True)

    inv: IonInvariants
    f1_actual: float = Field(ge=0)
    f2_actual: float = Field(ge=0)
    t: float = 0.0


class SensorReadings(BaseModel):
    """Process variables as the instruments report them"""
    model_config = ConfigDict(frozen=True)

    ph: float = Field(ge=0, le=14)
    f1: float
    f2: float
    c1_meas: float
    c2_meas: float
    t: float = 0.0


def invariant_derivatives(state: PlantState, params: PlantParams) -> Tuple[float, float]:
    return _derivatives(state.inv.alpha, state.inv.beta, state.f1_actual, state.f2_actual, params)


def _derivatives(alpha: float, beta: float, f1: float, f2: float, params: PlantParams) -> Tuple[float, float]:
    outflow = f1 + f2
    return (
        (f1 * params.c1 - outflow * alpha) / params.volume,
        (f2 * params.c2 - outflow * beta) / params.volume,
    )


def steady_state(f1: float, f2: float, params: PlantParams) -> IonInvariants:
    """Fixed point of the tank equations for constant flows"""
    total = f1 + f2
    if total <= 0:
        raise ValueError("steady state needs a positive total flow")
    return IonInvariants(alpha=params.c1 * f1 / total, beta=params.c2 * f2 / total)


def valve_step(current: float, commanded: float, model: ValveModel, dt: float, f_max: float = math.inf) -> float:
    """Advance one valve by dt toward its direction-dependent target"""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if commanded > current:
        target, tau = commanded * (1.0 - model.hysteresis_eps), model.tau_open
    elif commanded < current:
        target, tau = commanded * (1.0 + model.hysteresis_eps), model.tau_close
    else:
        return current
    target = min(max(target, 0.0), f_max)
    return target + (current - target) * math.exp(-dt / tau)


def plant_step(
    state: PlantState,
    f1_cmd: float,
    f2_cmd: float,
    params: PlantParams,
    valves: Tuple[ValveModel, ValveModel],
    dt: float,
) -> PlantState:
    """Valves first, then one RK4 step of the invariants at the new flows"""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    acid_valve, base_valve = valves
    # integrate at the same flows the state will record
    f1 = min(max(valve_step(state.f1_actual, f1_cmd, acid_valve, dt, params.f_max), 0.0), params.f_max)
    f2 = min(max(valve_step(state.f2_actual, f2_cmd, base_valve, dt, params.f_max), 0.0), params.f_max)

    a0, b0 = state.inv.alpha, state.inv.beta
    ka1, kb1 = _derivatives(a0, b0, f1, f2, params)
    ka2, kb2 = _derivatives(a0 + 0.5 * dt * ka1, b0 + 0.5 * dt * kb1, f1, f2, params)
    ka3, kb3 = _derivatives(a0 + 0.5 * dt * ka2, b0 + 0.5 * dt * kb2, f1, f2, params)
    ka4, kb4 = _derivatives(a0 + dt * ka3, b0 + dt * kb3, f1, f2, params)
    alpha = a0 + dt * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4) / 6.0
    beta = b0 + dt * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4) / 6.0

    fields = {"alpha": alpha, "beta": beta, "f1": f1, "f2": f2}
    for name, value in fields.items():
        if not math.isfinite(value):
            raise StateDiverged(f"{name} became non-finite ({value})")
        if value < -NEGATIVE_TOLERANCE:
            raise StateDiverged(f"{name} went negative ({value:.3e})")

    return PlantState(
        inv=IonInvariants(alpha=max(alpha, 0.0), beta=max(beta, 0.0)),
        f1_actual=f1,
        f2_actual=f2,
        t=state.t + dt,
    )


def measure(
    state: PlantState, params: PlantParams, rng: Optional[np.random.Generator] = None
) -> SensorReadings:
    """Read the instruments; Gaussian pH noise only when a sigma and an rng are given"""
    ph = ph_of(state.inv, params.constants)
    if params.ph_noise_sigma > 0 and rng is not None:
        ph += float(rng.normal(0.0, params.ph_noise_sigma))
    return SensorReadings(
        ph=min(max(ph, 0.0), 14.0),
        f1=state.f1_actual,
        f2=state.f2_actual,
        c1_meas=params.c1,
        c2_meas=params.c2,
        t=state.t,
    )
