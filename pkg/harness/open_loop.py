"""
Open-loop runs: the tank's dynamic response to a step in the valve commands and
the up/down characteristic of the flow valves
"""
import logging
from typing import Optional

import numpy as np
import pandas as pd

from controller.hybrid_controller import setpoints_from_split
from events.event_bus import RUN_FINISHED, RUN_STARTED, EventBus
from harness.config import OpenLoopConfig, ValveSweepConfig
from harness.trace import COLUMNS, SimTrace
from model.chemistry import base_fraction_for_ph, ph_of
from model.plant import PlantState, ValveModel, measure, plant_step, steady_state, valve_step
from utility.errors import StateDiverged

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ("valve", "command", "flow_up", "flow_down", "error_pct")


def _split_flows(cfg: OpenLoopConfig, ph: float):
    r = base_fraction_for_ph(ph, cfg.plant.c1, cfg.plant.c2, cfg.plant.constants)
    return setpoints_from_split(r, cfg.f_total)


def open_loop_response(cfg: OpenLoopConfig, bus: Optional[EventBus] = None, name: str = "openloop") -> SimTrace:
    """
    Tank at steady state for initial_ph, then the valve commands jump to the
    split of final_ph at t_step and are held

    ph_sp records the pH the commanded flows would give with ideal valves.
    delta stays 0, there is no supervisor.
    """
    params = cfg.plant
    n = cfg.steps
    rng = np.random.default_rng(cfg.seed)
    f1_0, f2_0 = _split_flows(cfg, cfg.initial_ph)
    f1_1, f2_1 = _split_flows(cfg, cfg.final_ph)
    state = PlantState(inv=steady_state(f1_0, f2_0, params), f1_actual=f1_0, f2_actual=f2_0)

    rows = {col: np.zeros(n) for col in COLUMNS}
    if bus is not None:
        bus.publish(RUN_STARTED, {"name": name, "steps": n, "controller": "open_loop"})
    for i in range(n):
        t = i * cfg.dt
        readings = measure(state, params, rng)
        stepped = t >= cfg.t_step
        f1_cmd, f2_cmd = (f1_1, f2_1) if stepped else (f1_0, f2_0)

        rows["t"][i] = t
        rows["ph_sp"][i] = cfg.final_ph if stepped else cfg.initial_ph
        rows["ph"][i] = readings.ph
        rows["f1_cmd"][i] = f1_cmd
        rows["f2_cmd"][i] = f2_cmd
        rows["f1"][i] = state.f1_actual
        rows["f2"][i] = state.f2_actual
        rows["alpha"][i] = state.inv.alpha
        rows["beta"][i] = state.inv.beta

        try:
            state = plant_step(state, f1_cmd, f2_cmd, params, cfg.valves, cfg.dt)
        except StateDiverged as exc:
            logger.error("%s diverged at step %d", name, i)
            raise exc.at(i, t) from exc

    if bus is not None:
        bus.publish(RUN_FINISHED, {"name": name, "rows": n})
    logger.info(
        "%s: pH %.2f -> %.2f over %.0f s",
        name,
        rows["ph"][0] if n else float("nan"),
        ph_of(state.inv, params.constants),
        cfg.duration,
    )
    return SimTrace.from_columns(rows)


def _settle(valve: ValveModel, current: float, command: float, f_max: float, dwell: float, dt: float) -> float:
    for _ in range(int(round(dwell / dt))):
        current = valve_step(current, command, valve, dt, f_max)
    return current


def valve_characteristic(valve: ValveModel, f_max: float, levels, dwell: float = 60.0, dt: float = 0.1) -> pd.DataFrame:
    """
    Flow reached after dwell seconds at each command, climbing from a closed
    valve and descending from a fully open one

    error_pct is the larger of the two direction errors, in percent of the command.
    """
    commands = [float(lv) * f_max for lv in levels]
    up = []
    current = 0.0
    for cmd in commands:
        current = _settle(valve, current, cmd, f_max, dwell, dt)
        up.append(current)
    down = []
    current = f_max
    for cmd in reversed(commands):
        current = _settle(valve, current, cmd, f_max, dwell, dt)
        down.append(current)
    down.reverse()

    frame = pd.DataFrame({"command": commands, "flow_up": up, "flow_down": down})
    frame["error_pct"] = 100.0 * np.maximum(
        (frame["command"] - frame["flow_up"]).abs(), (frame["flow_down"] - frame["command"]).abs()
    ) / frame["command"]
    return frame


def valve_sweep(cfg: ValveSweepConfig) -> pd.DataFrame:
    """Characteristic of the acid and base valves, one block of rows per valve"""
    frames = []
    for label, valve in zip(("acid", "base"), cfg.valves):
        frame = valve_characteristic(valve, cfg.f_max, cfg.levels, cfg.dwell, cfg.dt)
        frame.insert(0, "valve", label)
        frames.append(frame)
        logger.info("%s valve: up/down error %.1f..%.1f %%", label, frame["error_pct"].min(), frame["error_pct"].max())
    return pd.concat(frames, ignore_index=True)[list(SWEEP_COLUMNS)]
