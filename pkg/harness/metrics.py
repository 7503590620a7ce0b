"""
Step-response and tracking metrics of a trace
"""
import logging
import math
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from harness.config import SetpointSchedule
from harness.trace import SimTrace
from utility.errors import SegmentTooShort

logger = logging.getLogger(__name__)

SETTLING_BAND = 0.1  # pH
MIN_SEGMENT_SAMPLES = 5


class SegmentMetrics(BaseModel):
    """Response to one constant-setpoint segment; times are relative to its start"""
    model_config = ConfigDict(frozen=True)

    t_start: float
    t_end: float
    previous: float
    target: float
    rise_time_s: Optional[float] = Field(default=None, ge=0)
    settling_time_s: Optional[float] = Field(default=None, ge=0)
    first_entry_s: Optional[float] = Field(default=None, ge=0)
    overshoot_ph: float = Field(default=0.0, ge=0)


class Metrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    segments: List[SegmentMetrics]
    rmse_ph: float = Field(ge=0)
    iae_ph_s: float = Field(ge=0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([s.model_dump() for s in self.segments])

    def table(self) -> str:
        """Aligned plain-text table followed by the whole-run figures"""
        frame = self.to_frame()
        body = frame.to_string(index=False, float_format=lambda v: f"{v:.3f}", na_rep="-") if len(frame) else ""
        return f"{body}\nrmse_ph={self.rmse_ph:.4f}  iae_ph_s={self.iae_ph_s:.3f}"


def _crossing(t: np.ndarray, y: np.ndarray, level: float, direction: float) -> Optional[float]:
    """First time y reaches level moving in direction, linearly interpolated between samples"""
    reached = np.nonzero((y - level) * direction >= 0.0)[0]
    if len(reached) == 0:
        return None
    j = int(reached[0])
    if j == 0 or y[j] == y[j - 1]:
        return float(t[j])
    return float(t[j - 1] + (level - y[j - 1]) / (y[j] - y[j - 1]) * (t[j] - t[j - 1]))


def segment_metrics(t: np.ndarray, y: np.ndarray, previous: float, target: float, band: float = SETTLING_BAND) -> SegmentMetrics:
    t0 = float(t[0])
    span = target - previous
    inside = np.abs(y - target) <= band

    rise = None
    # a level change inside the band is not a step
    if abs(span) > band:
        direction = math.copysign(1.0, span)
        t10 = _crossing(t, y, previous + 0.1 * span, direction)
        t90 = _crossing(t, y, previous + 0.9 * span, direction)
        if t10 is not None and t90 is not None:
            rise = max(t90 - t10, 0.0)

    first_entry = float(t[np.argmax(inside)] - t0) if inside.any() else None

    outside = np.nonzero(~inside)[0]
    if len(outside) == 0:
        settling = 0.0
    elif outside[-1] == len(y) - 1:
        settling = None
    else:
        settling = float(t[outside[-1] + 1] - t0)

    if span > band:
        overshoot = max(0.0, float(np.max(y)) - target)
    elif span < -band:
        overshoot = max(0.0, target - float(np.min(y)))
    else:
        overshoot = 0.0

    return SegmentMetrics(
        t_start=t0,
        t_end=float(t[-1]),
        previous=previous,
        target=target,
        rise_time_s=rise,
        settling_time_s=settling,
        first_entry_s=first_entry,
        overshoot_ph=overshoot,
    )


def compute_metrics(trace: SimTrace, schedule: Optional[SetpointSchedule] = None, band: float = SETTLING_BAND) -> Metrics:
    """
    Split the run where the setpoint changes and score each segment

    The reference is schedule.value(t) when a schedule is given, otherwise the
    recorded setpoint column. The first segment's starting level is the first
    measured pH.
    """
    if len(trace) == 0:
        raise ValueError("metrics need a non-empty trace")
    t = trace.t
    y = trace.ph
    ref = np.array([schedule.value(float(ti)) for ti in t]) if schedule is not None else trace.ph_sp

    bounds = [0] + [int(i) + 1 for i in np.nonzero(np.diff(ref) != 0.0)[0]] + [len(t)]
    segments = []
    for lo, hi in zip(bounds, bounds[1:]):
        if hi - lo < MIN_SEGMENT_SAMPLES:
            raise SegmentTooShort(f"segment at t={t[lo]:g} s has {hi - lo} samples, need {MIN_SEGMENT_SAMPLES}")
        previous = float(ref[lo - 1]) if lo > 0 else float(y[0])
        segments.append(segment_metrics(t[lo:hi], y[lo:hi], previous, float(ref[lo]), band))

    err = y - ref
    rmse = float(np.sqrt(np.mean(err**2)))
    iae = float(np.trapezoid(np.abs(err), t)) if len(t) >= 2 else 0.0
    logger.debug("metrics over %d segments: rmse=%.4f iae=%.3f", len(segments), rmse, iae)
    return Metrics(segments=segments, rmse_ph=rmse, iae_ph_s=iae)
