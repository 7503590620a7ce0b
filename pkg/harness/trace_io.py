"""
CSV persistence of simulation traces
"""
import csv
import logging
import math
from pathlib import Path
from typing import Union

import numpy as np

from harness.trace import COLUMNS, SimTrace
from utility.errors import TraceFormatError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def write_csv(trace: SimTrace, path: Union[str, Path]) -> None:
    """Full-precision CSV; an empty trace gives a header-only file"""
    trace.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %d rows to %s", len(trace), path)


def read_csv(path: Union[str, Path]) -> SimTrace:
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise TraceFormatError(f"cannot open {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != COLUMNS:
            raise TraceFormatError(f"expected header {','.join(COLUMNS)}, got {header}", line=1)
        rows = []
        for row in reader:
            line = reader.line_num
            if len(row) != len(COLUMNS):
                raise TraceFormatError(f"expected {len(COLUMNS)} fields, got {len(row)}", line=line)
            try:
                values = [float(v) for v in row]
            except ValueError as exc:
                raise TraceFormatError(str(exc), line=line) from exc
            if not all(math.isfinite(v) for v in values):
                raise TraceFormatError("non-finite value", line=line)
            rows.append(values)

    data = np.array(rows, dtype=float).reshape(len(rows), len(COLUMNS))
    try:
        return SimTrace.from_columns({name: data[:, i] for i, name in enumerate(COLUMNS)})
    except ValueError as exc:
        raise TraceFormatError(f"{path}: {exc}") from exc
