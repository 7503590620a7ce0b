import numpy as np

from harness.trace import COLUMNS, SimTrace


def make_trace(t, ph_sp, ph):
    """Trace with the given pH columns and zeros elsewhere"""
    t = np.asarray(t, dtype=float)
    columns = {name: np.zeros_like(t) for name in COLUMNS}
    columns.update(t=t, ph_sp=np.asarray(ph_sp, dtype=float), ph=np.asarray(ph, dtype=float))
    return SimTrace.from_columns(columns)
