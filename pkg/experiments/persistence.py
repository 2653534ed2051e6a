"""
CSV traces and JSON summaries.

A trace file starts with the versioned header comment, then a table written
by pandas with ``%.12g`` floats, so identical runs give identical bytes.
"""
import json
from pathlib import Path

import numpy as np
import pandas as pd

from project.exceptions import ConfigurationError
from .enums import ExperimentConstants, ErrorMessages


def trace_filename(seed: int, horizon: int, sweep: bool = False) -> str:
    return f"seed-{seed}-T{horizon}.csv" if sweep else f"seed-{seed}.csv"


def write_trace(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as handle:
        handle.write(ExperimentConstants.CSV_HEADER + '\n')
        frame.to_csv(handle, index=False, float_format=ExperimentConstants.FLOAT_FORMAT, lineterminator='\n')
    return path


def read_trace(path) -> pd.DataFrame:
    with open(path) as handle:
        header = handle.readline().rstrip('\n')
        if header != ExperimentConstants.CSV_HEADER:
            raise ConfigurationError(ErrorMessages.NOT_A_TRACE.format(path=path, header=header))
        return pd.read_csv(handle)


def _to_builtin(value):
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def write_summary(summary: dict, directory) -> Path:
    path = Path(directory) / ExperimentConstants.SUMMARY_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as handle:
        json.dump(_to_builtin(summary), handle, indent=2)
        handle.write('\n')
    return path


def read_summary(directory) -> dict:
    with open(Path(directory) / ExperimentConstants.SUMMARY_FILE) as handle:
        return json.load(handle)


def log_spaced_rows(horizon: int, points: int = ExperimentConstants.SERIES_POINTS) -> np.ndarray:
    """At most ``points`` distinct row indices, log-spaced over 1..horizon."""
    stages = np.unique(np.round(np.logspace(0, np.log10(horizon), points)).astype(int))
    return stages - 1
