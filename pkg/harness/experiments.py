"""
Preset experiment configurations
"""
from typing import Tuple

from controller.hybrid_controller import CascadeConfig
from harness.config import ExperimentConfig, PiecewiseConstant, SquareWave
from model.plant import PlantParams, ValveModel

EXP3_STEPS = ((0.0, 7.0), (250.0, 10.0), (500.0, 6.0), (750.0, 10.0), (1000.0, 6.0), (1250.0, 9.0), (1500.0, 7.0), (1750.0, 10.0))


def experiment_1() -> ExperimentConfig:
    """Neutral start, step up to pH 10 at 300 s and back to 7 at 600 s"""
    return ExperimentConfig(
        plant=PlantParams(c1=0.052, c2=0.052),
        schedule=PiecewiseConstant(steps=((0.0, 7.0), (300.0, 10.0), (600.0, 7.0))),
        duration=900.0,
        initial_ph=7.0,
    )


def experiment_2() -> ExperimentConfig:
    """Unequal feeds tracking a square wave between pH 7 and 10"""
    return ExperimentConfig(
        plant=PlantParams(c1=0.051, c2=0.0489),
        schedule=SquareWave(center=8.5, amplitude=1.5, period=600.0, t_start=300.0),
        duration=2400.0,
        initial_ph=7.0,
    )


def experiment_3() -> Tuple[ExperimentConfig, ExperimentConfig]:
    """Same step sequence with hysteretic valves, hybrid versus fuzzy-only"""
    hybrid = ExperimentConfig(
        valves=(ValveModel(hysteresis_eps=0.04), ValveModel(hysteresis_eps=0.04)),
        cascade=CascadeConfig(controller_kind="hybrid"),
        schedule=PiecewiseConstant(steps=EXP3_STEPS),
        duration=2000.0,
        initial_ph=7.0,
    )
    fuzzy_only = hybrid.model_copy(update={"cascade": hybrid.cascade.model_copy(update={"controller_kind": "fuzzy_only"})})
    return hybrid, fuzzy_only


PRESETS = {
    "exp1": experiment_1,
    "exp2": experiment_2,
    "exp3": lambda: experiment_3()[0],
    "exp3-fuzzy": lambda: experiment_3()[1],
}
