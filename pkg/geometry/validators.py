"""
Sampled property checks for regularizers.

Each check draws a batch of random instances and returns the worst
violation of the inequality (positive means violated). Callers compare the
result against ``GeometryConstants.IDENTITY_TOL``.
"""
from typing import Dict, Tuple

import numpy as np

from .enums import GeometryConstants, RegularizerKind
from .regularizers import Regularizer
from .sets import ActionSet


class GeometryPropertyValidator:
    """Numerical certificates for the mirror-descent inequalities"""

    DUAL_SCALE = 2.0

    @staticmethod
    def sample_prox_points(reg: Regularizer, action_set: ActionSet, rng, count: int) -> np.ndarray:
        points = action_set.sample(rng, count)
        if reg.kind == RegularizerKind.ENTROPIC:
            # keep away from the floor so the identities are not polluted by clipping
            points = 0.98 * points + 0.02 * action_set.barycenter()
        return points

    @staticmethod
    def _instances(reg, action_set, rng, count) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = GeometryPropertyValidator.sample_prox_points(reg, action_set, rng, count)
        base = action_set.sample(rng, count)
        y = GeometryPropertyValidator.DUAL_SCALE * rng.standard_normal((count, action_set.dimension))
        return x, base, y

    @staticmethod
    def three_point_residual(reg, action_set, rng, count=GeometryConstants.PROPERTY_SAMPLES) -> float:
        a = action_set.sample(rng, count)
        x = GeometryPropertyValidator.sample_prox_points(reg, action_set, rng, count)
        x_prime = GeometryPropertyValidator.sample_prox_points(reg, action_set, rng, count)
        lhs = reg.bregman(a, x)
        rhs = (
            reg.bregman(a, x_prime)
            + reg.bregman(x_prime, x)
            + np.sum((reg.gradient(x) - reg.gradient(x_prime)) * (x_prime - a), axis=-1)
        )
        return float(np.max(np.abs(lhs - rhs)))

    @staticmethod
    def energy_sharp_violation(reg, action_set, rng, count=GeometryConstants.PROPERTY_SAMPLES) -> float:
        """D(p,x⁺) ≤ D(p,x) - D(x⁺,x) + <y, x⁺ - p>."""
        x, base, y = GeometryPropertyValidator._instances(reg, action_set, rng, count)
        x_next = reg.prox(action_set, x, y, check=False)
        lhs = reg.bregman(base, x_next)
        rhs = reg.bregman(base, x) - reg.bregman(x_next, x) + np.sum(y * (x_next - base), axis=-1)
        return float(np.max(lhs - rhs))

    @staticmethod
    def energy_strong_violation(reg, action_set, rng, count=GeometryConstants.PROPERTY_SAMPLES) -> float:
        """D(p,x⁺) ≤ D(p,x) + <y, x - p> + ‖y‖_*²/(2K)."""
        x, base, y = GeometryPropertyValidator._instances(reg, action_set, rng, count)
        x_next = reg.prox(action_set, x, y, check=False)
        lhs = reg.bregman(base, x_next)
        rhs = (
            reg.bregman(base, x)
            + np.sum(y * (x - base), axis=-1)
            + reg.dual_norm(y) ** 2 / (2.0 * reg.modulus)
        )
        return float(np.max(lhs - rhs))

    @staticmethod
    def template_violation(reg, action_set, rng, count=1_000, length=20, step_exponent=0.5) -> float:
        """
        Weighted quasi-descent along Y_{n+1} = prox(Y_n, w_n) with λ_n = 1/γ_n, γ_n = n^{-a}:

            Σ λ_n <w_n, p - Y_n> ≤ Σ (λ_n - λ_{n-1}) D(p, Y_n) + (1/2K) Σ λ_n ‖w_n‖_*²

        with λ_0 = 0.
        """
        base = action_set.sample(rng, count)
        state = np.broadcast_to(reg.minimizer(action_set), (count, action_set.dimension)).copy()
        lhs = np.zeros(count)
        rhs = np.zeros(count)
        previous_weight = 0.0
        for n in range(1, length + 1):
            weight = n ** step_exponent
            dual = GeometryPropertyValidator.DUAL_SCALE * rng.standard_normal((count, action_set.dimension)) / weight
            lhs += weight * np.sum(dual * (base - state), axis=-1)
            rhs += (weight - previous_weight) * reg.bregman(base, state)
            rhs += weight * reg.dual_norm(dual) ** 2 / (2.0 * reg.modulus)
            state = reg.prox(action_set, state, dual, check=False)
            previous_weight = weight
        return float(np.max(lhs - rhs))

    @staticmethod
    def strong_convexity_violation(reg, action_set, rng, count=GeometryConstants.PROPERTY_SAMPLES) -> float:
        """(K/2)‖p - x‖² - D(p, x) should never be positive."""
        base = action_set.sample(rng, count)
        x = GeometryPropertyValidator.sample_prox_points(reg, action_set, rng, count)
        return float(np.max(0.5 * reg.modulus * reg.norm(base - x) ** 2 - reg.bregman(base, x)))

    @staticmethod
    def bounded_divergence(reg, action_set, rng, count=GeometryConstants.PROPERTY_SAMPLES) -> Dict[str, float]:
        """Largest sampled D(p, x) next to the bound H + L·diam(X)."""
        base = action_set.sample(rng, count)
        x = GeometryPropertyValidator.sample_prox_points(reg, action_set, rng, count)
        lipschitz = float(np.max(reg.dual_norm(reg.gradient(x))))
        return {
            'largest': float(np.max(reg.bregman(base, x))),
            'bound': reg.depth(action_set) + lipschitz * action_set.diameter(),
        }

    @staticmethod
    def run_all(reg, action_set, seed: int = 0) -> Dict[str, float]:
        rng = np.random.default_rng(seed)
        results = {
            'three_point': GeometryPropertyValidator.three_point_residual(reg, action_set, rng),
            'energy_sharp': GeometryPropertyValidator.energy_sharp_violation(reg, action_set, rng),
            'energy_strong': GeometryPropertyValidator.energy_strong_violation(reg, action_set, rng),
            'template': GeometryPropertyValidator.template_violation(reg, action_set, rng),
            'strong_convexity': GeometryPropertyValidator.strong_convexity_violation(reg, action_set, rng),
        }
        if reg.kind == RegularizerKind.EUCLIDEAN:
            # the Lipschitz bound only applies to a Lipschitz h
            divergence = GeometryPropertyValidator.bounded_divergence(reg, action_set, rng)
            results['bounded_divergence'] = divergence['largest'] - divergence['bound']
        return results
