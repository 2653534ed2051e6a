from dataclasses import dataclass, asdict
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from project.exceptions import InputError
from .enums import MetricConstants, ErrorMessages


@dataclass(frozen=True)
class RateFit:
    """Least-squares line through (log n, log y_n) on a window."""

    slope: float
    intercept: float
    r_squared: float
    window: Tuple[float, float]

    def as_dict(self) -> dict:
        return asdict(self)


def fit_rate(series, window: Optional[Tuple[float, float]] = None, index: Optional[Sequence[float]] = None) -> RateFit:
    """
    Fit y_n ≈ e^a n^b.

    ``series[k]`` belongs to stage k + 1 unless ``index`` gives the abscissae
    (e.g. a sweep over horizons). Without an explicit window the fit uses the
    tail [T/2, T] of a stage series and every point of an indexed one.
    """
    values = np.asarray(series, dtype=float)
    positions = np.arange(1, values.size + 1, dtype=float) if index is None else np.asarray(index, dtype=float)
    if window is None:
        last = positions[-1]
        window = (MetricConstants.FIT_TAIL * last, last) if index is None else (positions[0], last)
    mask = (positions >= window[0]) & (positions <= window[1])
    if mask.sum() < 2:
        raise InputError(ErrorMessages.FIT_POINTS.format(count=int(mask.sum())))
    if np.any(values[mask] <= 0) or not np.all(np.isfinite(values[mask])):
        raise InputError(ErrorMessages.NON_POSITIVE_SERIES)
    result = linregress(np.log(positions[mask]), np.log(values[mask]))
    return RateFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=float(result.rvalue ** 2),
        window=(float(window[0]), float(window[1])),
    )
