"""
Pass/fail checks for the preset experiments
"""
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from harness.config import SetpointSchedule, schedule_breakpoints
from harness.metrics import SETTLING_BAND, Metrics, compute_metrics
from harness.trace import SimTrace

STEP_UP_WINDOW = (40.0, 160.0)  # s after the step
MAX_RIPPLE = 0.2  # pH peak-to-peak once settled


class Check(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    detail: str


def check_step_timing(trace: SimTrace, schedule: SetpointSchedule) -> List[Check]:
    """
    Step up enters the band inside the window; the step back down settles sooner

    Only segments that start at a schedule breakpoint count as steps.
    """
    metrics = compute_metrics(trace, schedule)
    steps = metrics.segments[1:]
    up = next((s for s in steps if s.target > s.previous), None)
    down = next((s for s in steps if s.target < s.previous and (up is None or s.t_start > up.t_start)), None)
    checks = []
    up_entry = up.first_entry_s if up is not None else None
    lo, hi = STEP_UP_WINDOW
    checks.append(Check(
        name="step_up_entry",
        passed=up_entry is not None and lo <= up_entry <= hi,
        detail=f"first entry {up_entry} s, window [{lo:g}, {hi:g}]",
    ))
    up_settle = up.settling_time_s if up is not None else None
    down_settle = down.settling_time_s if down is not None else None
    checks.append(Check(
        name="down_faster_than_up",
        passed=up_settle is not None and down_settle is not None and down_settle < up_settle,
        detail=f"settling down {down_settle} s vs up {up_settle} s",
    ))
    return checks


def check_tracking(trace: SimTrace, schedule: SetpointSchedule, band: float = SETTLING_BAND) -> List[Check]:
    """Settled before every setpoint change, with no sustained ripple afterwards"""
    checks = []
    duration = float(trace.t[-1]) + trace.dt
    for toggle in schedule_breakpoints(schedule, duration):
        i = int(np.searchsorted(trace.t, toggle)) - 1
        if i < 0:
            continue
        err = abs(float(trace.ph[i]) - schedule.value(float(trace.t[i])))
        checks.append(Check(name=f"settled_before_{toggle:g}", passed=err <= band, detail=f"|error|={err:.4f}"))

    metrics = compute_metrics(trace, schedule, band)
    for seg in metrics.segments:
        if seg.settling_time_s is None:
            continue
        tail = trace.ph[(trace.t >= seg.t_start + seg.settling_time_s) & (trace.t <= seg.t_end)]
        ripple = float(np.ptp(tail)) if len(tail) else 0.0
        checks.append(Check(name=f"ripple_from_{seg.t_start:g}", passed=ripple < MAX_RIPPLE, detail=f"p2p={ripple:.4f}"))
    return checks


def check_comparison(hybrid: Metrics, fuzzy_only: Metrics) -> List[Check]:
    return [Check(
        name="hybrid_tracks_better",
        passed=hybrid.rmse_ph <= fuzzy_only.rmse_ph,
        detail=f"rmse hybrid {hybrid.rmse_ph:.4f} vs fuzzy-only {fuzzy_only.rmse_ph:.4f}",
    )]


def report(checks: List[Check], title: Optional[str] = None) -> str:
    lines = [title] if title else []
    width = max((len(c.name) for c in checks), default=0)
    for c in checks:
        lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    return "\n".join(lines)
