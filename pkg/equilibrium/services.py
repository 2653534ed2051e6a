"""
Nash-equilibrium oracles for stage games and game sequences.
"""
import logging
from typing import Optional

import numpy as np

from project.exceptions import ConvergenceError, UnsupportedGameError
from games.enums import Monotonicity, SequenceKind
from games.families import BilinearZeroSum, StageGame
from games.sequences import GameSequence
from games.validators import GameCertificateValidator
from geometry.profiles import Profile, as_profile, copy_profile, joint_inner, profile_sub
from .certificates import EquilibriumCertificate
from .enums import SolveMethod, EquilibriumConstants, ErrorMessages

logger = logging.getLogger(__name__)


class EquilibriumService:
    """Closed-form and extragradient equilibrium oracles with VI certificates"""

    @staticmethod
    def nash_closed_form(game: StageGame) -> Profile:
        """Analytic equilibrium; raises UnsupportedGameError for families without one."""
        return game.closed_form_equilibrium()

    @staticmethod
    def stampacchia_residual(game: StageGame, x: Profile) -> float:
        """max over X of <V(x), x' - x>, exact per player through the support function."""
        x = as_profile(x)
        gradient = game.gradient(x)
        residual = 0.0
        for action_set, v, xi in zip(game.action_sets, gradient, x):
            residual += float(action_set.support_values(v) - np.dot(v, xi))
        return max(residual, 0.0)

    @staticmethod
    def minty_residual(game: StageGame, x: Profile, rng=None, count=EquilibriumConstants.MINTY_SAMPLES) -> float:
        """max over sampled x' of <V(x'), x' - x>."""
        rng = rng if rng is not None else np.random.default_rng(0)
        x = as_profile(x)
        samples = GameCertificateValidator.sample_profile(game, rng, count)
        offsets = profile_sub(samples, x)
        return float(np.max(joint_inner(game.gradient(samples), offsets)))

    @staticmethod
    def certify(game: StageGame, x: Profile, method: str = SolveMethod.CLOSED_FORM, iterations: int = 0,
                rng=None) -> EquilibriumCertificate:
        x = as_profile(x)
        return EquilibriumCertificate(
            point=x,
            stampacchia_residual=EquilibriumService.stampacchia_residual(game, x),
            minty_residual=EquilibriumService.minty_residual(game, x, rng=rng),
            method=method,
            iterations=iterations,
        )

    @staticmethod
    def nash_extragradient(game: StageGame, tol: float = EquilibriumConstants.TOLERANCE,
                           max_iters: int = EquilibriumConstants.MAX_ITERS,
                           start: Optional[Profile] = None) -> EquilibriumCertificate:
        """
        Extragradient x ← Π(x + γV(Π(x + γV(x)))) with γ = 1/(2Λ).

        Merely monotone families also keep the running average of the
        leading points; whichever of the last iterate and the average first
        has a Stampacchia residual ≤ ``tol`` is returned.
        """
        lipschitz = game.lipschitz
        step = 1.0 / (2.0 * lipschitz) if lipschitz > 0 else 1.0
        project = [action_set.project for action_set in game.action_sets]
        x = copy_profile(start) if start is not None else tuple(s.barycenter() for s in game.action_sets)
        averaged = game.monotonicity == Monotonicity.MONOTONE
        total = tuple(np.zeros_like(xi) for xi in x)
        residual = np.inf
        for iteration in range(1, max_iters + 1):
            leading = tuple(p(xi + step * v) for p, xi, v in zip(project, x, game.gradient(x)))
            x = tuple(p(xi + step * v) for p, xi, v in zip(project, x, game.gradient(leading)))
            residual = EquilibriumService.stampacchia_residual(game, x)
            if residual <= tol:
                logger.debug("extragradient converged after %d iterations (residual=%.2e)", iteration, residual)
                return EquilibriumService.certify(game, x, SolveMethod.EXTRAGRADIENT, iteration)
            if averaged:
                total = tuple(t + lead for t, lead in zip(total, leading))
                average = tuple(t / iteration for t in total)
                average_residual = EquilibriumService.stampacchia_residual(game, average)
                if average_residual <= tol:
                    logger.debug("extragradient average converged after %d iterations", iteration)
                    return EquilibriumService.certify(game, average, SolveMethod.EXTRAGRADIENT_ERGODIC, iteration)
                residual = min(residual, average_residual)
            if iteration % EquilibriumConstants.LOG_EVERY == 0:
                logger.debug("extragradient iteration %d residual=%.2e", iteration, residual)
        raise ConvergenceError(ErrorMessages.EXTRAGRADIENT_STALLED.format(family=game.family),
                               residual=residual, iterations=max_iters)

    @staticmethod
    def saddle_gap(game: StageGame, x: Profile):
        """max(Aᵀx₁) - min(Ax₂); batched over a leading stage axis."""
        if not isinstance(game, BilinearZeroSum):
            raise UnsupportedGameError(ErrorMessages.NOT_BILINEAR.format(family=game.family))
        x1, x2 = np.asarray(x[0], dtype=float), np.asarray(x[1], dtype=float)
        gap = np.max(x1 @ game.matrix, axis=-1) - np.min(x2 @ game.matrix.T, axis=-1)
        return float(gap) if np.ndim(gap) == 0 else gap

    @staticmethod
    def solve(game: StageGame, tol: float = EquilibriumConstants.TOLERANCE) -> Profile:
        """Closed form when the family has one, extragradient otherwise."""
        try:
            return EquilibriumService.nash_closed_form(game)
        except UnsupportedGameError:
            return EquilibriumService.nash_extragradient(game, tol=tol).point

    @staticmethod
    def limit_equilibrium(sequence: GameSequence) -> Profile:
        return EquilibriumService.solve(sequence.limit_game())

    @staticmethod
    def equilibrium_path(sequence: GameSequence, horizon: int) -> Profile:
        """x*_n for n = 1..horizon+1, shaped (horizon+1, d_i)."""
        if sequence.kind == SequenceKind.STATIC:
            point = EquilibriumService.limit_equilibrium(sequence)
            return tuple(np.tile(x, (horizon + 1, 1)) for x in point)
        return sequence.equilibrium_path(horizon)
