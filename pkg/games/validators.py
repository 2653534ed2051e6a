"""
Sampled certificates for stage-game metadata.

Every check returns the worst violation on random feasible profiles
(positive means violated), mirroring ``geometry.validators``.
"""
from typing import Dict

import numpy as np

from geometry.profiles import Profile, joint_distance, joint_inner, profile_sub
from .enums import GameConstants, SequenceKind
from .families import StageGame
from .sequences import GameSequence


def _euclidean(profile: Profile) -> np.ndarray:
    return np.sqrt(sum(np.sum(np.square(v), axis=-1) for v in profile))


class GameCertificateValidator:
    """Numerical checks of concavity, B, Λ, monotonicity and analytic gradients"""

    PAIR_SAMPLES = 10_000
    POINT_SAMPLES = 1_000

    @staticmethod
    def sample_profile(game: StageGame, rng, count: int) -> Profile:
        return tuple(action_set.sample(rng, count) for action_set in game.action_sets)

    @staticmethod
    def concavity_violation(game: StageGame, rng, count=POINT_SAMPLES) -> float:
        worst = -np.inf
        for i, action_set in enumerate(game.action_sets):
            profile = GameCertificateValidator.sample_profile(game, rng, count)
            other = action_set.sample(rng, count)
            t = rng.uniform(size=(count, 1))
            mixed = game.deviate(profile, i, t * profile[i] + (1 - t) * other)
            lhs = game.payoff(i, mixed)
            rhs = t[:, 0] * game.payoff(i, profile) + (1 - t[:, 0]) * game.payoff(i, game.deviate(profile, i, other))
            worst = max(worst, float(np.max(rhs - lhs)))
        return worst

    @staticmethod
    def gradient_bound_excess(game: StageGame, rng, count=PAIR_SAMPLES) -> float:
        profile = GameCertificateValidator.sample_profile(game, rng, count)
        return float(np.max(_euclidean(game.gradient(profile))) - game.bound)

    @staticmethod
    def lipschitz_excess(game: StageGame, rng, count=PAIR_SAMPLES) -> float:
        x = GameCertificateValidator.sample_profile(game, rng, count)
        x_other = GameCertificateValidator.sample_profile(game, rng, count)
        change = _euclidean(profile_sub(game.gradient(x_other), game.gradient(x)))
        return float(np.max(change - game.lipschitz * joint_distance(x_other, x)))

    @staticmethod
    def monotonicity_violation(game: StageGame, rng, count=PAIR_SAMPLES) -> float:
        """<V(x') - V(x), x' - x> + μ‖x' - x‖², with μ the game's strong modulus (0 when merely monotone)."""
        x = GameCertificateValidator.sample_profile(game, rng, count)
        x_other = GameCertificateValidator.sample_profile(game, rng, count)
        inner = joint_inner(profile_sub(game.gradient(x_other), game.gradient(x)), profile_sub(x_other, x))
        return float(np.max(inner + game.strong_modulus * joint_distance(x_other, x) ** 2))

    @staticmethod
    def finite_difference_error(game: StageGame, rng, count=POINT_SAMPLES, step=GameConstants.FD_STEP) -> float:
        """Largest central-difference error relative to max(1, |V_ik|)."""
        profile = GameCertificateValidator.sample_profile(game, rng, count)
        analytic = game.gradient(profile)
        worst = 0.0
        for i, action in enumerate(profile):
            for k in range(action.shape[-1]):
                bump = np.zeros(action.shape[-1])
                bump[k] = step
                ahead = game.payoff(i, game.deviate(profile, i, action + bump))
                behind = game.payoff(i, game.deviate(profile, i, action - bump))
                numeric = (ahead - behind) / (2 * step)
                exact = analytic[i][..., k]
                error = np.abs(numeric - exact) / np.maximum(1.0, np.abs(exact))
                worst = max(worst, float(np.max(error)))
        return worst

    @staticmethod
    def stabilization_excess(sequence: GameSequence, rng, stages=(1, 10, 100, 1_000, 10_000), count=POINT_SAMPLES) -> float:
        """max_x ‖V_n(x) - V(x)‖ - β_n on a grid of stages; ≤ 0 when the decay holds."""
        if sequence.kind == SequenceKind.DRIFTING:
            return 0.0
        limit = sequence.limit_game()
        worst = -np.inf
        for n in stages:
            profile = GameCertificateValidator.sample_profile(limit, rng, count)
            difference = profile_sub(sequence.stage(n).gradient(profile), limit.gradient(profile))
            worst = max(worst, float(np.max(_euclidean(difference)) - sequence.stabilization_bound(n)))
        return worst

    @staticmethod
    def run_all(game: StageGame, seed: int = 0) -> Dict[str, float]:
        rng = np.random.default_rng(seed)
        return {
            'concavity': GameCertificateValidator.concavity_violation(game, rng),
            'gradient_bound': GameCertificateValidator.gradient_bound_excess(game, rng),
            'lipschitz': GameCertificateValidator.lipschitz_excess(game, rng),
            'monotonicity': GameCertificateValidator.monotonicity_violation(game, rng),
            'finite_difference': GameCertificateValidator.finite_difference_error(game, rng),
        }

    @staticmethod
    def tolerances() -> Dict[str, float]:
        return {
            'concavity': GameConstants.CONCAVITY_TOL,
            'gradient_bound': GameConstants.MONOTONICITY_TOL,
            'lipschitz': GameConstants.MONOTONICITY_TOL,
            'monotonicity': GameConstants.MONOTONICITY_TOL,
            'finite_difference': GameConstants.FD_RELATIVE_TOL,
        }
