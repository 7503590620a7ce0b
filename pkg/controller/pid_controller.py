"""
Discrete PID flow-rate controller and Ziegler-Nichols closed-loop tuning
"""
import logging
import math
from collections import deque
from fractions import Fraction
from typing import Callable, Deque, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from utility.errors import NoOscillation

logger = logging.getLogger(__name__)

ControllerKind = Literal["P", "PI", "PID"]
Trend = Literal["growing", "decaying", "steady"]


class ZnUltimate(BaseModel):
    """Ultimate proportional gain and the oscillation period it produces"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    g: float = Field(gt=0)
    p: float = Field(gt=0)  # s


class PidGains(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kp: float = Field(ge=0)
    ki: float = Field(default=0.0, ge=0)  # 1/s
    kd: float = Field(default=0.0, ge=0)  # s


class PidState(BaseModel):
    """Integrator and filtered-derivative memory of one controller"""
    model_config = ConfigDict(frozen=True)

    integral: float = 0.0
    prev_meas: Optional[float] = None
    out_lo: float = 0.0
    out_hi: float = 1.0
    d_filter_tau: float = Field(default=1.0, ge=0)
    d_state: float = 0.0

    @model_validator(mode="after")
    def _check_bounds(self) -> "PidState":
        if not self.out_lo < self.out_hi:
            raise ValueError(f"out_lo ({self.out_lo}) must be below out_hi ({self.out_hi})")
        return self


def zn_tune(u: ZnUltimate, kind: ControllerKind = "PID") -> PidGains:
    """Closed-loop Ziegler-Nichols table, evaluated in exact rational arithmetic"""
    g, p = Fraction(u.g), Fraction(u.p)
    if kind == "P":
        kp = g / 2
        return PidGains(kp=float(kp))
    if kind == "PI":
        kp = g * Fraction(45, 100)
        return PidGains(kp=float(kp), ki=float(Fraction(6, 5) * kp / p))
    if kind == "PID":
        kp = g * Fraction(3, 5)
        return PidGains(kp=float(kp), ki=float(2 * kp / p), kd=float(kp * p / 8))
    raise ValueError(f"unknown controller kind {kind!r}")


def new_pid_state(
    gains: PidGains,
    out_lo: float = 0.0,
    out_hi: float = 1.0,
    d_filter_tau: float = 1.0,
    steady_output: Optional[float] = None,
    measurement: Optional[float] = None,
) -> PidState:
    """Fresh state; with steady_output the integrator is preloaded for a bumpless start"""
    integral = 0.0
    if steady_output is not None and gains.ki > 0:
        integral = min(max(steady_output, out_lo), out_hi) / gains.ki
    return PidState(
        integral=integral,
        prev_meas=measurement,
        out_lo=out_lo,
        out_hi=out_hi,
        d_filter_tau=d_filter_tau,
    )


def pid_update(
    s: PidState, gains: PidGains, setpoint: float, measurement: float, dt: float
) -> Tuple[float, PidState]:
    """
    One positional PID step

    The derivative acts on the filtered measurement, so setpoint steps cause no
    kick. The integrator is advanced after the output is formed and is frozen
    while the output sits in saturation in the direction the error pushes.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    error = setpoint - measurement

    if s.prev_meas is None:
        d_state = s.d_state
    else:
        raw = (measurement - s.prev_meas) / dt
        d_state = s.d_state + dt / (s.d_filter_tau + dt) * (raw - s.d_state)

    unsat = gains.kp * error + gains.ki * s.integral - gains.kd * d_state
    output = min(max(unsat, s.out_lo), s.out_hi)

    integral = s.integral
    deepens = (unsat > s.out_hi and error > 0) or (unsat < s.out_lo and error < 0)
    if not deepens:
        integral += error * dt
    if gains.ki > 0:
        integral = min(max(integral, s.out_lo / gains.ki), s.out_hi / gains.ki)

    return output, s.model_copy(update={"integral": integral, "prev_meas": measurement, "d_state": d_state})


class OscillationProbe(BaseModel):
    """Envelope trend and period of a P-only closed-loop run"""
    model_config = ConfigDict(frozen=True)

    gain: float
    trend: Trend
    period: Optional[float] = None


class FlowLoopModel(BaseModel):
    """
    First-order-plus-dead-time flow loop used for ultimate-gain probing

    Defaults put the P-only ultimate point at G = 18, P = 33 s.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    gain: float = Field(default=0.2187, gt=0)
    time_constant: float = Field(default=20.0, gt=0)  # s
    dead_time: float = Field(default=9.594, ge=0)  # s


def _extrema(y: np.ndarray) -> np.ndarray:
    dy = np.diff(y)
    return np.nonzero(dy[:-1] * dy[1:] < 0)[0] + 1


def classify_envelope(y: np.ndarray, dt: float, tol: float = 0.01) -> Tuple[Trend, Optional[float]]:
    """Growth of the peak-to-peak swings of a closed-loop response"""
    tail = y[-max(len(y) // 10, 2):]
    # a converged loop may still flicker by an ulp around its fixed point
    if np.ptp(tail) <= 1e-9 * max(float(np.ptp(y)), 1e-300):
        return "decaying", None
    ext = _extrema(y)
    if len(ext) < 8:
        return "decaying", None
    # first swings carry the setpoint transient
    ext = ext[2:]
    swings = np.abs(np.diff(y[ext]))
    if swings[0] <= 0 or swings[-1] <= 1e-12 * swings.max():
        return "decaying", None
    growth = math.exp(math.log(swings[-1] / swings[0]) / (len(swings) - 1))
    maxima = [i for i in ext if y[i] > y[i - 1]]
    period = float(np.mean(np.diff(maxima))) * dt if len(maxima) >= 2 else None
    if growth > 1.0 + tol:
        return "growing", period
    if growth < 1.0 - tol:
        return "decaying", period
    return "steady", period


def p_only_probe(
    model: FlowLoopModel,
    setpoint: float = 1.0,
    dt_max: float = 0.02,
    horizon_factor: float = 60.0,
) -> Callable[[float], OscillationProbe]:
    """
    Probe running the P-only loop on the model with an exact zero-order hold

    The step shrinks with the gain so the sampled loop cannot oscillate on its
    own; the dead time is a whole number of steps.
    """
    horizon = horizon_factor * (model.time_constant + model.dead_time)

    def probe(gain: float) -> OscillationProbe:
        dt = min(dt_max, model.time_constant / (4.0 * (1.0 + model.gain * gain)))
        delay = 0
        if model.dead_time > 0:
            delay = math.ceil(model.dead_time / dt)
            dt = model.dead_time / delay
        steps = int(horizon / dt)
        a = math.exp(-dt / model.time_constant)
        b = (1.0 - a) * model.gain
        pending: Deque[float] = deque([0.0] * delay)
        y = 0.0
        out = np.empty(steps)
        for i in range(steps):
            pending.append(gain * (setpoint - y))
            y = a * y + b * pending.popleft()
            out[i] = y
        trend, period = classify_envelope(out, dt)
        logger.debug("probe gain=%.4g: %s (period=%s)", gain, trend, period)
        return OscillationProbe(gain=gain, trend=trend, period=period)

    return probe


def find_ultimate(
    plant_probe: Callable[[float], OscillationProbe],
    g_start: float = 0.5,
    g_max: float = 512.0,
    rel_tol: float = 0.02,
) -> ZnUltimate:
    """Smallest gain that sustains oscillation, by doubling then bisection"""
    lo = 0.0
    g = g_start
    while True:
        if g > g_max:
            raise NoOscillation(f"no sustained oscillation up to gain {g_max:g}")
        if plant_probe(g).trend == "decaying":
            lo = g
            g *= 2.0
        else:
            hi = g
            break
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if plant_probe(mid).trend == "decaying":
            lo = mid
        else:
            hi = mid
    final = plant_probe(hi)
    if final.period is None:
        raise NoOscillation(f"gain {hi:g} oscillates but no period could be measured")
    logger.info("ultimate gain G=%.4g, period P=%.4g s", hi, final.period)
    return ZnUltimate(g=hi, p=final.period)
