"""
Mamdani fuzzy controller for the pH error

Nine input sets over [-5, 5] pH, nine output sets over [-100, 100], a one-to-one
rule base, min implication, max aggregation and centroid defuzzification.
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator, model_validator

from utility.errors import EmptyAggregate, FuzzyTableError

logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, np.ndarray]


class MembershipFunction(BaseModel):
    """Triangle (a, b, c) or trapezoid (a, b, c, d) with ascending breakpoints"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    shape: Literal["triangle", "trapezoid"]
    points: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_points(self) -> "MembershipFunction":
        expected = 3 if self.shape == "triangle" else 4
        if len(self.points) != expected:
            raise ValueError(f"{self.shape} needs {expected} breakpoints, got {len(self.points)}")
        if any(p1 < p0 for p0, p1 in zip(self.points, self.points[1:])):
            raise ValueError(f"breakpoints must be ascending: {self.points}")
        return self

    @property
    def corners(self) -> Tuple[float, float, float, float]:
        if self.shape == "triangle":
            a, b, c = self.points
            return a, b, b, c
        a, b, c, d = self.points
        return a, b, c, d


class LinguisticSet(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    label: str
    mf: MembershipFunction


class RuleBase(BaseModel):
    """IF error is <input label> THEN delta is <output label>"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    rules: Tuple[Tuple[str, str], ...]

    @field_validator("rules")
    @classmethod
    def _one_rule_per_input(cls, rules):
        inputs = [src for src, _ in rules]
        outputs = [dst for _, dst in rules]
        if len(set(inputs)) != len(inputs) or len(set(outputs)) != len(outputs):
            raise ValueError("rule base must map input labels to output labels one-to-one")
        return rules


def _tri(label: str, a: float, b: float, c: float) -> LinguisticSet:
    return LinguisticSet(label=label, mf=MembershipFunction(shape="triangle", points=(a, b, c)))


def _trap(label: str, a: float, b: float, c: float, d: float) -> LinguisticSet:
    return LinguisticSet(label=label, mf=MembershipFunction(shape="trapezoid", points=(a, b, c, d)))


DEFAULT_INPUT_SETS: Tuple[LinguisticSet, ...] = (
    _trap("NXL", -5.0, -5.0, -4.0, -2.0),
    _tri("NL", -3.0, -2.0, -1.0),
    _tri("NM", -2.0, -1.25, -0.5),
    _tri("NS", -1.0, -0.5, 0.0),
    _tri("Z", -0.5, 0.0, 0.5),
    _tri("PS", 0.0, 0.5, 1.0),
    _tri("PM", 0.5, 1.25, 2.0),
    _tri("PL", 1.0, 2.0, 3.0),
    _trap("PXL", 2.0, 4.0, 5.0, 5.0),
)

DEFAULT_OUTPUT_SETS: Tuple[LinguisticSet, ...] = (
    _trap("ONXL", -100.0, -100.0, -60.0, -45.0),
    _tri("ONL", -50.0, -40.0, -30.0),
    _tri("ONM", -35.0, -25.0, -15.0),
    _tri("ONS", -20.0, -10.0, 0.0),
    _tri("OZ", -0.5, 0.0, 0.5),
    _tri("OPS", 0.0, 10.0, 20.0),
    _tri("OPM", 15.0, 25.0, 35.0),
    _tri("OPL", 30.0, 40.0, 50.0),
    _trap("OPXL", 45.0, 60.0, 100.0, 100.0),
)

DEFAULT_RULES = RuleBase(rules=tuple((s.label, "O" + s.label) for s in DEFAULT_INPUT_SETS))


def membership(mf: MembershipFunction, x: ArrayOrFloat) -> ArrayOrFloat:
    """Piecewise-linear degree, closed at the breakpoints, 0 outside the support"""
    a, b, c, d = mf.corners
    xs = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        rise = np.ones_like(xs) if b == a else (xs - a) / (b - a)
        fall = np.ones_like(xs) if d == c else (d - xs) / (d - c)
    degree = np.clip(np.minimum(rise, fall), 0.0, 1.0)
    degree = np.where((xs < a) | (xs > d), 0.0, degree)
    return float(degree) if degree.ndim == 0 else degree


def fuzzify(e: float, sets: Sequence[LinguisticSet], universe: Tuple[float, float] = (-5.0, 5.0)) -> Dict[str, float]:
    clamped = min(max(e, universe[0]), universe[1])
    return {s.label: membership(s.mf, clamped) for s in sets}


def output_grid(universe: Tuple[float, float] = (-100.0, 100.0), resolution: float = 0.01) -> np.ndarray:
    n = int(round((universe[1] - universe[0]) / resolution)) + 1
    return np.linspace(universe[0], universe[1], n)


def infer(
    degrees: Dict[str, float],
    rules: RuleBase,
    output_sets: Sequence[LinguisticSet],
    grid: np.ndarray,
    consequents: Optional[Dict[str, np.ndarray]] = None,
) -> np.ndarray:
    """
    Clip each fired consequent at its antecedent degree, aggregate by max

    consequents holds each output set sampled on grid; sets missing from it are
    sampled on the fly.
    """
    by_label = {s.label: s for s in output_sets}
    sampled = consequents or {}
    aggregate = np.zeros_like(grid)
    for src, dst in rules.rules:
        w = degrees.get(src, 0.0)
        if w > 0.0:
            mu = sampled[dst] if dst in sampled else membership(by_label[dst].mf, grid)
            np.maximum(aggregate, np.minimum(mu, w), out=aggregate)
    return aggregate


def defuzzify(aggregate: np.ndarray, grid: np.ndarray) -> float:
    """Centroid by trapezoidal quadrature on the grid"""
    area = np.trapezoid(aggregate, grid)
    if area <= 0.0:
        raise EmptyAggregate("aggregated membership is zero everywhere")
    return float(np.trapezoid(grid * aggregate, grid) / area)


class FuzzyController(BaseModel):
    """Immutable single-input Mamdani controller"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    input_sets: Tuple[LinguisticSet, ...] = DEFAULT_INPUT_SETS
    output_sets: Tuple[LinguisticSet, ...] = DEFAULT_OUTPUT_SETS
    rules: RuleBase = DEFAULT_RULES
    defuzz_resolution: float = Field(default=0.01, gt=0)
    input_universe: Tuple[float, float] = (-5.0, 5.0)
    output_universe: Tuple[float, float] = (-100.0, 100.0)

    _grid: np.ndarray = PrivateAttr()
    _consequents: Dict[str, np.ndarray] = PrivateAttr()

    @model_validator(mode="after")
    def _check_tables(self) -> "FuzzyController":
        for family in (self.input_sets, self.output_sets):
            labels = [s.label for s in family]
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate labels in {labels}")
        in_labels = {s.label for s in self.input_sets}
        out_labels = {s.label for s in self.output_sets}
        sources = {src for src, _ in self.rules.rules}
        targets = {dst for _, dst in self.rules.rules}
        if sources != in_labels or targets != out_labels:
            raise ValueError("rules must pair every input set with exactly one output set")
        _check_coverage(self.input_sets, output_grid(self.input_universe, 0.01), "input")
        _check_coverage(self.output_sets, output_grid(self.output_universe, self.defuzz_resolution), "output")
        return self

    def model_post_init(self, __context) -> None:
        self._grid = output_grid(self.output_universe, self.defuzz_resolution)
        self._consequents = {s.label: membership(s.mf, self._grid) for s in self.output_sets}

    @property
    def grid(self) -> np.ndarray:
        return self._grid

    def fuzzify(self, e: float) -> Dict[str, float]:
        return fuzzify(e, self.input_sets, self.input_universe)

    def infer(self, degrees: Dict[str, float]) -> np.ndarray:
        return infer(degrees, self.rules, self.output_sets, self._grid, self._consequents)

    def defuzzify(self, aggregate: np.ndarray) -> float:
        return defuzzify(aggregate, self._grid)

    def controller_output(self, e: float) -> float:
        """Crisp delta for a pH error (setpoint minus measurement)"""
        return self.defuzzify(self.infer(self.fuzzify(e)))


def _check_coverage(sets: Sequence[LinguisticSet], grid: np.ndarray, family: str) -> None:
    top = np.max(np.vstack([membership(s.mf, grid) for s in sets]), axis=0)
    if np.any(top <= 0.0):
        gap = float(grid[np.argmax(top <= 0.0)])
        raise ValueError(f"{family} sets leave x={gap:g} uncovered")


class _SetSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str
    shape: Literal["triangle", "trapezoid"]
    points: List[float]


class FuzzyTableFile(BaseModel):
    """Override file: sets listed by label, shape and breakpoints, rules as pairs"""
    model_config = ConfigDict(extra="forbid")

    input_sets: List[_SetSpec]
    output_sets: List[_SetSpec]
    rules: List[Tuple[str, str]]
    defuzz_resolution: float = 0.01

    def build(self) -> FuzzyController:
        def sets(specs: List[_SetSpec]) -> Tuple[LinguisticSet, ...]:
            return tuple(
                LinguisticSet(label=s.label, mf=MembershipFunction(shape=s.shape, points=tuple(s.points)))
                for s in specs
            )

        return FuzzyController(
            input_sets=sets(self.input_sets),
            output_sets=sets(self.output_sets),
            rules=RuleBase(rules=tuple(self.rules)),
            defuzz_resolution=self.defuzz_resolution,
        )


def load_fuzzy_tables(path: Union[str, Path]) -> FuzzyController:
    try:
        controller = FuzzyTableFile.model_validate_json(Path(path).read_text()).build()
    except (OSError, ValidationError) as exc:
        raise FuzzyTableError(f"invalid fuzzy tables in {path}: {exc}") from exc
    logger.info("loaded fuzzy tables from %s (%d rules)", path, len(controller.rules.rules))
    return controller


def dump_fuzzy_tables(controller: FuzzyController) -> str:
    """JSON document accepted by load_fuzzy_tables"""
    def sets(family: Sequence[LinguisticSet]) -> List[dict]:
        return [{"label": s.label, "shape": s.mf.shape, "points": list(s.mf.points)} for s in family]

    return json.dumps(
        {
            "input_sets": sets(controller.input_sets),
            "output_sets": sets(controller.output_sets),
            "rules": [list(pair) for pair in controller.rules.rules],
            "defuzz_resolution": controller.defuzz_resolution,
        },
        indent=2,
    )
