"""
Experiment configuration schemas and JSON loading
"""
import logging
import math
from pathlib import Path
from typing import Annotated, List, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from controller.hybrid_controller import CascadeConfig
from controller.pid_controller import ControllerKind, FlowLoopModel
from model.chemistry import reachable_ph
from model.plant import PlantParams, ValveModel
from utility.errors import ConfigError

logger = logging.getLogger(__name__)


class PiecewiseConstant(BaseModel):
    """Setpoint held at each value from its start time on"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["piecewise_constant"] = "piecewise_constant"
    steps: Tuple[Tuple[float, float], ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_steps(self) -> "PiecewiseConstant":
        times = [t for t, _ in self.steps]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError(f"step times must be strictly ascending: {times}")
        if any(not 0.0 <= v <= 14.0 for _, v in self.steps):
            raise ValueError("setpoints must lie within [0, 14]")
        return self

    def value(self, t: float) -> float:
        current = self.steps[0][1]
        for t_start, v in self.steps:
            if t >= t_start:
                current = v
            else:
                break
        return current


class SquareWave(BaseModel):
    """Low (center - amplitude) before t_start, then high for the first half of each period"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["square_wave"] = "square_wave"
    center: float
    amplitude: float = Field(ge=0)
    period: float = Field(gt=0)
    t_start: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _check_range(self) -> "SquareWave":
        if self.center - self.amplitude < 0.0 or self.center + self.amplitude > 14.0:
            raise ValueError("square wave must stay within [0, 14]")
        return self

    def value(self, t: float) -> float:
        if t < self.t_start:
            return self.center - self.amplitude
        phase = math.fmod(t - self.t_start, self.period)
        return self.center + self.amplitude if phase < 0.5 * self.period else self.center - self.amplitude


SetpointSchedule = Annotated[Union[PiecewiseConstant, SquareWave], Field(discriminator="kind")]


class ExperimentConfig(BaseModel):
    """One closed-loop run; the JSON file mirrors these field names"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    plant: PlantParams = PlantParams()
    valves: Tuple[ValveModel, ValveModel] = (ValveModel(), ValveModel())
    cascade: CascadeConfig = CascadeConfig()
    schedule: SetpointSchedule
    duration: float = Field(gt=0)  # s
    dt: float = Field(default=0.1, gt=0)  # s
    initial_ph: float = Field(default=7.0, ge=0, le=14)
    seed: int = 0

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if self.cascade.fuzzy_period < self.dt:
            raise ValueError(f"fuzzy_period ({self.cascade.fuzzy_period}) must not be shorter than dt ({self.dt})")
        if self.cascade.f_total > 2.0 * self.plant.f_max:
            raise ValueError(f"f_total ({self.cascade.f_total}) exceeds both streams at f_max")
        lo, hi = reachable_ph(self.plant.c1, self.plant.c2, self.plant.constants)
        if not lo < self.initial_ph < hi:
            raise ValueError(f"initial_ph {self.initial_ph} is not reachable with these feeds ({lo:.2f}..{hi:.2f})")
        return self

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.dt))


class TuningConfig(BaseModel):
    """Input of the `tune` command"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    flow_loop: FlowLoopModel = FlowLoopModel()
    kind: ControllerKind = "PID"
    g_start: float = Field(default=0.5, gt=0)
    g_max: float = Field(default=512.0, gt=0)
    rel_tol: float = Field(default=0.02, gt=0, lt=1)


class OpenLoopConfig(BaseModel):
    """Valve commands stepped from the split for initial_ph to the split for final_ph, no controller"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    plant: PlantParams = PlantParams()
    # a 4 % valve error moves the pH 11 split to the acid side
    valves: Tuple[ValveModel, ValveModel] = (ValveModel(hysteresis_eps=0.0), ValveModel(hysteresis_eps=0.0))
    f_total: float = Field(default=0.05, gt=0)  # L/s
    initial_ph: float = Field(default=3.0, ge=0, le=14)
    final_ph: float = Field(default=11.0, ge=0, le=14)
    t_step: float = Field(default=10.0, ge=0)  # s
    duration: float = Field(default=300.0, gt=0)  # s
    dt: float = Field(default=0.1, gt=0)  # s
    seed: int = 0

    @model_validator(mode="after")
    def _check_reachable(self) -> "OpenLoopConfig":
        if self.f_total > 2.0 * self.plant.f_max:
            raise ValueError(f"f_total ({self.f_total}) exceeds both streams at f_max")
        lo, hi = reachable_ph(self.plant.c1, self.plant.c2, self.plant.constants)
        for name in ("initial_ph", "final_ph"):
            if not lo < getattr(self, name) < hi:
                raise ValueError(f"{name} {getattr(self, name)} is not reachable with these feeds ({lo:.2f}..{hi:.2f})")
        return self

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.dt))


class ValveSweepConfig(BaseModel):
    """Staircase of valve commands, climbed from closed and descended from fully open"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    valves: Tuple[ValveModel, ValveModel] = (ValveModel(), ValveModel())
    f_max: float = Field(default=0.05, gt=0)  # L/s
    # fractions of f_max
    levels: Tuple[float, ...] = Field(default=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0), min_length=1)
    dwell: float = Field(default=60.0, gt=0)  # s per level
    dt: float = Field(default=0.1, gt=0)  # s

    @model_validator(mode="after")
    def _check_levels(self) -> "ValveSweepConfig":
        if any(not 0.0 < lv <= 1.0 for lv in self.levels):
            raise ValueError(f"levels must lie within (0, 1]: {self.levels}")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError(f"levels must be strictly ascending: {self.levels}")
        return self


def load_config(path: Union[str, Path], model: type = ExperimentConfig):
    """Parse a JSON config file; any problem becomes ConfigError"""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = model.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    logger.info("loaded %s from %s", model.__name__, path)
    return cfg


def dump_config(cfg: BaseModel) -> str:
    return cfg.model_dump_json(indent=2)


def save_config(cfg: BaseModel, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_config(cfg) + "\n")


def schedule_breakpoints(schedule: SetpointSchedule, duration: float) -> List[float]:
    """Times within [0, duration) where the setpoint changes"""
    if isinstance(schedule, PiecewiseConstant):
        return [t for t, _ in schedule.steps[1:] if t < duration]
    times = []
    t = schedule.t_start
    half = 0.5 * schedule.period
    while t < duration:
        if t > 0:
            times.append(t)
        t += half
    return times
