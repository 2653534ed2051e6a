"""
Game evaluation services used by the oracles, the learner and the metrics.
"""
import logging

import numpy as np

from project.exceptions import GeometryDomainError
from geometry.profiles import Profile, as_profile
from .families import StageGame
from .sequences import GameSequence

logger = logging.getLogger(__name__)


class GameService:
    """Payoff and gradient evaluation for stage games"""

    @staticmethod
    def require_profile(game: StageGame, x) -> Profile:
        """Check that ``x`` has one feasible action per player."""
        profile = as_profile(x)
        if len(profile) != game.players:
            raise GeometryDomainError(f"Expected {game.players} player actions, got {len(profile)}")
        for action_set, action in zip(game.action_sets, profile):
            action_set.require(action)
        return profile

    @staticmethod
    def eval_payoff(game: StageGame, i: int, x) -> float:
        """u_i(x) exactly per the family's formula."""
        profile = GameService.require_profile(game, x)
        return float(game.payoff(i, profile))

    @staticmethod
    def eval_gradient(game: StageGame, x) -> Profile:
        """V(x) = (V_1(x), ..., V_N(x))."""
        profile = GameService.require_profile(game, x)
        return tuple(np.array(v, dtype=float) for v in game.gradient(profile))

    @staticmethod
    def stage(sequence: GameSequence, n: int) -> StageGame:
        return sequence.stage(n)
