"""
Fuzzy pH supervisor over per-stream PID flow loops

Every fuzzy_period the supervisor turns the pH error into an increment of the
acid/base split at constant total flow. Every plant step the two PID loops drive
their valves so the measured flows follow the split. The fuzzy-only baseline
sends the split straight to the valves.
"""
import logging
import math
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from controller.fuzzy_controller import FuzzyController
from controller.pid_controller import PidGains, PidState, ZnUltimate, new_pid_state, pid_update, zn_tune
from model.chemistry import base_fraction_for_ph, reachable_ph
from model.plant import PlantParams, SensorReadings

logger = logging.getLogger(__name__)

PH_SCALE = 14.0
# tolerance when comparing accumulated clock time with the fuzzy period
_CLOCK_EPS = 1e-9

DEFAULT_ULTIMATE = ZnUltimate(g=18.0, p=33.0)


def _zn_default() -> PidGains:
    return zn_tune(DEFAULT_ULTIMATE, "PID")


class CascadeConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    fuzzy_period: float = Field(default=1.0, gt=0)  # s
    f_total: float = Field(default=0.05, gt=0)  # L/s
    # (acid, base)
    gains: Tuple[PidGains, PidGains] = Field(default_factory=lambda: (_zn_default(), _zn_default()))
    controller_kind: Literal["hybrid", "fuzzy_only"] = "hybrid"
    split_space: Literal["ph", "flow"] = "ph"
    split_rate: float = Field(default=0.0065, gt=0)  # full scale per s per 100 delta
    split_gain: float = Field(default=0.1, ge=0)  # full scale per 100 change in delta
    d_filter_tau: float = Field(default=1.0, ge=0)  # s


class ControllerState(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fuzzy: FuzzyController
    pid_acid: PidState
    pid_base: PidState
    split: float = Field(ge=0, le=1)  # base fraction r
    split_ph: float = Field(ge=0, le=1)  # steady-state pH of the split, / 14
    last_fuzzy_t: Optional[float] = None
    clock: float = 0.0
    last_delta: float = 0.0


def split_from_delta(
    r: float,
    delta: float,
    fuzzy_period: float,
    rate: float = 0.02,
    gain: float = 0.0,
    last_delta: float = 0.0,
) -> float:
    """
    Integrate the fuzzy increment into a fraction, saturating at [0, 1]

    gain adds a velocity-form proportional step gain * (delta - last_delta) / 100.
    The combined step is dropped when it points against delta.
    """
    step = (delta / 100.0) * rate * fuzzy_period + gain * (delta - last_delta) / 100.0
    if delta > 0:
        step = max(step, 0.0)
    elif delta < 0:
        step = min(step, 0.0)
    else:
        step = 0.0
    return min(max(r + step, 0.0), 1.0)


def setpoints_from_split(r: float, f_total: float) -> Tuple[float, float]:
    """(acid, base) flow setpoints; they always sum to f_total"""
    f2 = r * f_total
    return f_total - f2, f2


def initial_controller_state(
    cfg: CascadeConfig,
    params: PlantParams,
    initial_ph: float,
    fuzzy: Optional[FuzzyController] = None,
    valve_gain: Tuple[float, float] = (1.0, 1.0),
) -> ControllerState:
    """
    State at equilibrium for the initial pH

    valve_gain is the steady flow/command ratio of each valve so the PID
    integrators can be preloaded without a bump.
    """
    r = base_fraction_for_ph(initial_ph, params.c1, params.c2, params.constants)
    f1_sp, f2_sp = setpoints_from_split(r, cfg.f_total)
    pid_acid = new_pid_state(
        cfg.gains[0],
        d_filter_tau=cfg.d_filter_tau,
        steady_output=f1_sp / params.f_max / valve_gain[0],
        measurement=f1_sp / params.f_max,
    )
    pid_base = new_pid_state(
        cfg.gains[1],
        d_filter_tau=cfg.d_filter_tau,
        steady_output=f2_sp / params.f_max / valve_gain[1],
        measurement=f2_sp / params.f_max,
    )
    return ControllerState(
        fuzzy=fuzzy or FuzzyController(),
        pid_acid=pid_acid,
        pid_base=pid_base,
        split=r,
        split_ph=min(max(initial_ph / PH_SCALE, 0.0), 1.0),
    )


def _supervise(
    cs: ControllerState, cfg: CascadeConfig, params: PlantParams, ph_setpoint: float, readings: SensorReadings
) -> ControllerState:
    """Outer fuzzy loop; runs only when a fuzzy period has elapsed"""
    due = cs.last_fuzzy_t is None or cs.clock - cs.last_fuzzy_t >= cfg.fuzzy_period - _CLOCK_EPS
    if not due:
        return cs
    delta = cs.fuzzy.controller_output(ph_setpoint - readings.ph)
    if cfg.split_space == "flow":
        r = split_from_delta(cs.split, delta, cfg.fuzzy_period, cfg.split_rate, cfg.split_gain, cs.last_delta)
        split_ph = cs.split_ph
    else:
        lo, hi = reachable_ph(readings.c1_meas, readings.c2_meas, params.constants)
        split_ph = split_from_delta(
            cs.split_ph, delta, cfg.fuzzy_period, cfg.split_rate, cfg.split_gain, cs.last_delta
        )
        split_ph = min(max(split_ph, lo / PH_SCALE), hi / PH_SCALE)
        r = base_fraction_for_ph(split_ph * PH_SCALE, readings.c1_meas, readings.c2_meas, params.constants)
    return cs.model_copy(update={"split": r, "split_ph": split_ph, "last_fuzzy_t": cs.clock, "last_delta": delta})


def control_step(
    cs: ControllerState,
    cfg: CascadeConfig,
    params: PlantParams,
    ph_setpoint: float,
    readings: SensorReadings,
    dt: float,
) -> Tuple[float, float, ControllerState]:
    """Hybrid step: fuzzy split update, then PID flow loops on normalized flow"""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    cs = _supervise(cs, cfg, params, ph_setpoint, readings)
    f1_sp, f2_sp = setpoints_from_split(cs.split, cfg.f_total)
    scale = params.f_max
    u1, pid_acid = pid_update(cs.pid_acid, cfg.gains[0], f1_sp / scale, readings.f1 / scale, dt)
    u2, pid_base = pid_update(cs.pid_base, cfg.gains[1], f2_sp / scale, readings.f2 / scale, dt)
    cs = cs.model_copy(update={"pid_acid": pid_acid, "pid_base": pid_base, "clock": cs.clock + dt})
    return _clamp(u1 * scale, scale), _clamp(u2 * scale, scale), cs


def fuzzy_only_step(
    cs: ControllerState,
    cfg: CascadeConfig,
    params: PlantParams,
    ph_setpoint: float,
    readings: SensorReadings,
    dt: float,
) -> Tuple[float, float, ControllerState]:
    """Baseline: the fuzzy split goes to the valves with no flow correction"""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    cs = _supervise(cs, cfg, params, ph_setpoint, readings)
    f1_sp, f2_sp = setpoints_from_split(cs.split, cfg.f_total)
    cs = cs.model_copy(update={"clock": cs.clock + dt})
    return _clamp(f1_sp, params.f_max), _clamp(f2_sp, params.f_max), cs


def _clamp(value: float, f_max: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"non-finite valve command {value}")
    return min(max(value, 0.0), f_max)
