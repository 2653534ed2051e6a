"""
Geometry operations used by the learner, the oracles and the metrics.
"""
import logging
from typing import Tuple

import numpy as np

from .regularizers import Regularizer
from .sets import ActionSet

logger = logging.getLogger(__name__)


class GeometryService:
    """Bregman divergences, prox-mappings and linear maximization over action sets"""

    @staticmethod
    def bregman(reg: Regularizer, action_set: ActionSet, p, x) -> float:
        """
        D(p, x) = h(p) - h(x) - <∇h(x), p - x>.

        Raises GeometryDomainError when p is not in the set or x is outside
        the prox-domain (e.g. a zero simplex coordinate for the entropic kind).
        """
        p = action_set.require(p)
        x = reg.require_prox_domain(action_set, x)
        return float(max(reg.bregman(p, x), 0.0))

    @staticmethod
    def prox(reg: Regularizer, action_set: ActionSet, x, y) -> np.ndarray:
        """argmin over x' of <y, x - x'> + D(x', x)."""
        return reg.prox(action_set, x, y)

    @staticmethod
    def dgf_min(reg: Regularizer, action_set: ActionSet) -> np.ndarray:
        return reg.minimizer(action_set)

    @staticmethod
    def support_max(action_set: ActionSet, c) -> Tuple[np.ndarray, float]:
        return action_set.support_max(Regularizer.require_finite(c))

    @staticmethod
    def three_point_check(reg: Regularizer, action_set: ActionSet, a, x, x_prime) -> float:
        """Residual of D(a,x) = D(a,x') + D(x',x) + <∇h(x) - ∇h(x'), x' - a>."""
        a = action_set.require(a)
        x = reg.require_prox_domain(action_set, x)
        x_prime = reg.require_prox_domain(action_set, x_prime)
        lhs = reg.bregman(a, x)
        rhs = (
            reg.bregman(a, x_prime)
            + reg.bregman(x_prime, x)
            + np.dot(reg.gradient(x) - reg.gradient(x_prime), x_prime - a)
        )
        return float(abs(lhs - rhs))
