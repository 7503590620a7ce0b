"""
Column-oriented record of a closed-loop run
"""
from typing import Dict, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

COLUMNS: Tuple[str, ...] = ("t", "ph_sp", "ph", "f1_cmd", "f2_cmd", "f1", "f2", "alpha", "beta", "delta")

# relative slack on the sample spacing, t is built as step * dt
_SPACING_RTOL = 1e-9


class SimTrace(BaseModel):
    """
    One row per plant step: time, pH setpoint and measurement, valve commands,
    actual flows, invariants and the last fuzzy increment
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray
    ph_sp: np.ndarray
    ph: np.ndarray
    f1_cmd: np.ndarray
    f2_cmd: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    delta: np.ndarray

    @model_validator(mode="after")
    def _check_columns(self) -> "SimTrace":
        n = len(self.t)
        for name in COLUMNS:
            col = getattr(self, name)
            if col.ndim != 1 or len(col) != n:
                raise ValueError(f"column {name} has shape {col.shape}, expected ({n},)")
        if n >= 2:
            steps = np.diff(self.t)
            if np.any(steps <= 0):
                raise ValueError("t must be strictly increasing")
            if np.any(np.abs(steps - steps[0]) > _SPACING_RTOL * max(abs(self.t[-1]), 1.0)):
                raise ValueError("t must be uniformly spaced")
        return self

    @classmethod
    def from_columns(cls, columns: Dict[str, np.ndarray]) -> "SimTrace":
        return cls(**{name: np.asarray(columns[name], dtype=float) for name in COLUMNS})

    @classmethod
    def empty(cls) -> "SimTrace":
        return cls.from_columns({name: np.empty(0) for name in COLUMNS})

    def __len__(self) -> int:
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self) >= 2 else 0.0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: getattr(self, name) for name in COLUMNS}, columns=list(COLUMNS))

    def to_dict(self) -> Dict[str, list]:
        return {name: getattr(self, name).tolist() for name in COLUMNS}

    def equals(self, other: "SimTrace") -> bool:
        return len(self) == len(other) and all(
            np.array_equal(getattr(self, name), getattr(other, name)) for name in COLUMNS
        )
