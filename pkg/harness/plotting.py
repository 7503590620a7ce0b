"""
SVG plots of pH traces and valve characteristics
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib as mpl

mpl.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from harness.config import SetpointSchedule  # noqa: E402
from harness.trace import SimTrace  # noqa: E402

logger = logging.getLogger(__name__)

# stable element ids across runs
mpl.rcParams["svg.hashsalt"] = "phsim"

PH_MARGIN = 0.5


def _limits(traces: Sequence[SimTrace], schedule: Optional[SetpointSchedule]):
    values = [tr.ph for tr in traces] + [tr.ph_sp for tr in traces]
    if schedule is not None:
        values += [np.array([schedule.value(float(t)) for t in tr.t]) for tr in traces]
    stacked = np.concatenate(values)
    duration = max(float(tr.t[-1]) + tr.dt for tr in traces)
    return duration, float(stacked.min()) - PH_MARGIN, float(stacked.max()) + PH_MARGIN


def plot_comparison(
    traces: Sequence[SimTrace],
    labels: Sequence[str],
    path: Union[str, Path],
    schedule: Optional[SetpointSchedule] = None,
    title: Optional[str] = None,
) -> None:
    """Setpoint of the first trace plus the measured pH of every trace"""
    if not traces or any(len(tr) == 0 for tr in traces):
        raise ValueError("plotting needs at least one non-empty trace")
    if len(labels) != len(traces):
        raise ValueError("one label per trace")
    duration, y_lo, y_hi = _limits(traces, schedule)

    fig, ax = plt.subplots(figsize=(9, 4.5))
    try:
        ref = traces[0]
        sp = np.array([schedule.value(float(t)) for t in ref.t]) if schedule is not None else ref.ph_sp
        ax.step(ref.t, sp, where="post", color="black", linestyle="--", linewidth=1.0, label="setpoint", gid="ph-setpoint")
        for i, (tr, label) in enumerate(zip(traces, labels)):
            ax.plot(tr.t, tr.ph, linewidth=1.2, label=label, gid=f"ph-measured-{i}")
        ax.set_xlim(0.0, duration)
        ax.set_ylim(y_lo, y_hi)
        ax.set_xlabel("time [s]")
        ax.set_ylabel("pH")
        if title:
            ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
    finally:
        plt.close(fig)
    logger.info("plot written to %s", path)


def plot(trace: SimTrace, schedule: Optional[SetpointSchedule], path: Union[str, Path], title: Optional[str] = None) -> None:
    plot_comparison([trace], ["measured"], path, schedule=schedule, title=title)


def plot_valve_characteristic(frame, path: Union[str, Path], title: Optional[str] = None) -> None:
    """Flow against command for each valve, opening and closing"""
    if frame.empty:
        raise ValueError("plotting needs at least one sweep row")
    fig, ax = plt.subplots(figsize=(6, 5))
    try:
        top = float(frame["command"].max())
        ax.plot([0.0, top], [0.0, top], color="black", linestyle=":", linewidth=1.0, label="ideal", gid="valve-ideal")
        for label, rows in frame.groupby("valve", sort=False):
            ax.plot(rows["command"], rows["flow_up"], marker="^", label=f"{label} opening", gid=f"valve-{label}-up")
            ax.plot(rows["command"], rows["flow_down"], marker="v", label=f"{label} closing", gid=f"valve-{label}-down")
        ax.set_xlabel("command [L/s]")
        ax.set_ylabel("flow [L/s]")
        if title:
            ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
    finally:
        plt.close(fig)
    logger.info("plot written to %s", path)
