import logging

import numpy as np

from project.exceptions import ConvergenceError
from .enums import GameConstants

logger = logging.getLogger(__name__)


def projected_gradient_ascent(gradient, project, start, step, max_iters=GameConstants.ASCENT_MAX_ITERS,
                              tol=GameConstants.ASCENT_TOL, label='projected gradient ascent'):
    """
    Maximize a smooth concave objective over a convex set.

    ``gradient`` and ``project`` may act on a batch of independent problems;
    convergence is declared when the largest coordinate change is below ``tol``.
    """
    x = np.array(start, dtype=float)
    change = np.inf
    for iteration in range(1, max_iters + 1):
        candidate = project(x + step * gradient(x))
        change = float(np.max(np.abs(candidate - x))) if candidate.size else 0.0
        x = candidate
        if change <= tol:
            logger.debug("%s converged after %d iterations (change=%.2e)", label, iteration, change)
            return x
    raise ConvergenceError(f"{label} did not converge", residual=change, iterations=max_iters)
