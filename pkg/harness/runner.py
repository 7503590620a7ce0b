"""
Closed-loop simulation of one experiment
"""
import logging
from typing import Optional

import numpy as np

from controller.fuzzy_controller import FuzzyController
from controller.hybrid_controller import control_step, fuzzy_only_step, initial_controller_state, setpoints_from_split
from events.event_bus import PROGRESS, RUN_FINISHED, RUN_STARTED, EventBus
from harness.config import ExperimentConfig
from harness.trace import COLUMNS, SimTrace
from model.chemistry import base_fraction_for_ph
from model.plant import PlantState, measure, plant_step, steady_state
from utility.errors import StateDiverged

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 0.1  # fraction of the run between progress events


def initial_plant_state(cfg: ExperimentConfig) -> PlantState:
    """Tank at the steady state whose pH is cfg.initial_ph, valves at the matching flows"""
    params = cfg.plant
    r = base_fraction_for_ph(cfg.initial_ph, params.c1, params.c2, params.constants)
    f1, f2 = setpoints_from_split(r, cfg.cascade.f_total)
    return PlantState(inv=steady_state(f1, f2, params), f1_actual=f1, f2_actual=f2)


def run_experiment(
    cfg: ExperimentConfig,
    bus: Optional[EventBus] = None,
    fuzzy: Optional[FuzzyController] = None,
    name: str = "run",
) -> SimTrace:
    """
    Simulate cfg.duration / cfg.dt steps and record one row before each step

    Deterministic for a given config: the only randomness is the sensor noise
    generator seeded from cfg.seed.
    """
    params = cfg.plant
    n = cfg.steps
    rng = np.random.default_rng(cfg.seed)
    hybrid = cfg.cascade.controller_kind == "hybrid"
    step_fn = control_step if hybrid else fuzzy_only_step

    # a valve opening toward its command settles at command * (1 - eps)
    valve_gain = tuple(1.0 - v.hysteresis_eps for v in cfg.valves) if hybrid else (1.0, 1.0)
    state = initial_plant_state(cfg)
    cs = initial_controller_state(cfg.cascade, params, cfg.initial_ph, fuzzy=fuzzy, valve_gain=valve_gain)

    rows = {col: np.empty(n) for col in COLUMNS}
    report_every = max(1, int(n * PROGRESS_EVERY))
    if bus is not None:
        bus.publish(RUN_STARTED, {"name": name, "steps": n, "controller": cfg.cascade.controller_kind})

    for i in range(n):
        t = i * cfg.dt
        readings = measure(state, params, rng)
        ph_sp = cfg.schedule.value(t)
        f1_cmd, f2_cmd, cs = step_fn(cs, cfg.cascade, params, ph_sp, readings, cfg.dt)

        rows["t"][i] = t
        rows["ph_sp"][i] = ph_sp
        rows["ph"][i] = readings.ph
        rows["f1_cmd"][i] = f1_cmd
        rows["f2_cmd"][i] = f2_cmd
        rows["f1"][i] = state.f1_actual
        rows["f2"][i] = state.f2_actual
        rows["alpha"][i] = state.inv.alpha
        rows["beta"][i] = state.inv.beta
        rows["delta"][i] = cs.last_delta

        try:
            state = plant_step(state, f1_cmd, f2_cmd, params, cfg.valves, cfg.dt)
        except StateDiverged as exc:
            logger.error("%s diverged at step %d", name, i)
            raise exc.at(i, t) from exc

        if bus is not None and (i + 1) % report_every == 0:
            bus.publish(PROGRESS, {"name": name, "step": i + 1, "steps": n, "ph": readings.ph})

    trace = SimTrace.from_columns(rows)
    if bus is not None:
        bus.publish(RUN_FINISHED, {"name": name, "rows": n})
    logger.info("%s: %d steps simulated", name, n)
    return trace
