"""
Figures of merit computed from run traces.

All operations evaluate whole windows at once through ``stage_batch``; a
window is an inclusive ``(start, end)`` pair of stage indices.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from project.exceptions import ConfigurationError, UnsupportedGameError
from equilibrium.services import EquilibriumService
from games.enums import SequenceKind
from games.families import OnlineLinear, StageGame
from games.sequences import GameSequence
from games.solvers import projected_gradient_ascent
from geometry.enums import SetKind
from geometry.profiles import Profile, joint_distance, joint_dual_norm
from oracles.schedules import NoiseSchedule
from .enums import Target, MetricConstants, ErrorMessages
from .fits import RateFit, fit_rate
from .trace import RunTrace

logger = logging.getLogger(__name__)

Window = Optional[Tuple[int, int]]


class MetricsService:
    """Regret, gap, tracking and rate figures for a RunTrace"""

    @staticmethod
    def _slice(trace: RunTrace, window: Window, realized: bool = False):
        rows = trace.window(window)
        profile = tuple(x[rows] for x in trace.played(realized))
        return rows, profile, trace.sequence.stage_batch(trace.stages[rows])

    # Gap and regret

    @staticmethod
    def gap(trace: RunTrace, i: int, window: Window = None) -> float:
        """max over x_i of Σ <V_{i,n}(X_n), x_i - X_{i,n}>, exact through the support function."""
        rows = trace.window(window)
        gradients = trace.gradients[i][rows]
        actions = trace.actions[i][rows]
        action_set = trace.sequence.action_sets[i]
        summed = np.sum(gradients, axis=0)
        return float(action_set.support_values(summed) - np.sum(gradients * actions))

    @staticmethod
    def cumulative_gap(trace: RunTrace, i: int) -> np.ndarray:
        """Gap over [1, n] for every n."""
        gradients = trace.gradients[i]
        action_set = trace.sequence.action_sets[i]
        running = np.cumsum(gradients, axis=0)
        return action_set.support_values(running) - np.cumsum(np.sum(gradients * trace.actions[i], axis=-1))

    @staticmethod
    def static_regret(trace: RunTrace, i: int, window: Window = None) -> float:
        """max over fixed x_i of Σ [u_{i,n}(x_i; X_{-i,n}) - u_{i,n}(X_n)]."""
        _, profile, game = MetricsService._slice(trace, window)
        comparator = game.summed_best_response(i, profile)
        if comparator is None:
            comparator = MetricsService._summed_ascent(game, i, profile)
        deviation = game.deviate(profile, i, comparator)
        return float(np.sum(game.payoff(i, deviation)) - np.sum(game.payoff(i, profile)))

    @staticmethod
    def _summed_ascent(game: StageGame, i: int, profile: Profile) -> np.ndarray:
        action_set = game.action_sets[i]
        if action_set.kind == SetKind.BOX and action_set.dimension == 1:
            # scalar actions: bounded Brent on the summed payoff
            result = minimize_scalar(
                lambda xi: -np.sum(game.payoff(i, game.deviate(profile, i, np.array([xi])))),
                bounds=(float(action_set.lower[0]), float(action_set.upper[0])),
                method='bounded',
                options={'xatol': MetricConstants.INNER_TOL},
            )
            return np.array([result.x])
        stages = profile[i].shape[0]
        step = 1.0 / (max(game.lipschitz, 1e-12) * stages)
        return projected_gradient_ascent(
            lambda xi: np.sum(game.player_gradient(i, game.deviate(profile, i, xi)), axis=0),
            game.action_sets[i].project,
            np.mean(profile[i], axis=0),
            step,
            max_iters=MetricConstants.INNER_MAX_ITERS,
            tol=MetricConstants.INNER_TOL,
            label='static regret comparator',
        )

    @staticmethod
    def stage_dynamic_regret(trace: RunTrace, i: int, window: Window = None) -> np.ndarray:
        """max_{x_i} u_{i,n}(x_i; X_{-i,n}) - u_{i,n}(X_n) per stage."""
        _, profile, game = MetricsService._slice(trace, window)
        responses = game.best_response(i, profile)
        deviation = game.deviate(profile, i, responses)
        return game.payoff(i, deviation) - game.payoff(i, profile)

    @staticmethod
    def dynamic_regret(trace: RunTrace, i: int, window: Window = None) -> float:
        return float(np.sum(MetricsService.stage_dynamic_regret(trace, i, window)))

    @staticmethod
    def cumulative_dynamic_regret(trace: RunTrace, i: int) -> np.ndarray:
        return np.cumsum(MetricsService.stage_dynamic_regret(trace, i))

    # Equilibrium tracking

    @staticmethod
    def _require_unique(sequence: GameSequence):
        if not sequence.unique_equilibrium:
            raise UnsupportedGameError(ErrorMessages.NO_UNIQUE_EQUILIBRIUM.format(
                monotonicity=sequence.base.monotonicity))

    @staticmethod
    def reference_path(sequence: GameSequence, horizon: int) -> Profile:
        """
        x*_n for n = 1..horizon.

        Drifting sequences use their per-stage equilibria; static and
        stabilizing ones are measured against the limit equilibrium.
        """
        MetricsService._require_unique(sequence)
        if sequence.kind == SequenceKind.DRIFTING:
            path = EquilibriumService.equilibrium_path(sequence, horizon)
            return tuple(x[:horizon] for x in path)
        point = EquilibriumService.limit_equilibrium(sequence)
        return tuple(np.tile(x, (horizon, 1)) for x in point)

    @staticmethod
    def squared_tracking_errors(trace: RunTrace, realized: bool = False) -> np.ndarray:
        """‖X_n - x*_n‖² per stage (X̂_n with ``realized`` on bandit traces)."""
        path = MetricsService.reference_path(trace.sequence, trace.horizon)
        return joint_distance(trace.played(realized), path) ** 2

    @staticmethod
    def tracking_error(trace: RunTrace, window: Window = None, realized: bool = False) -> float:
        rows = trace.window(window)
        return float(np.sum(MetricsService.squared_tracking_errors(trace, realized)[rows]))

    @staticmethod
    def equilibrium_steps(sequence: GameSequence, horizon: int) -> np.ndarray:
        """‖x*_{n+1} - x*_n‖ for n = 1..horizon."""
        MetricsService._require_unique(sequence)
        path = EquilibriumService.equilibrium_path(sequence, horizon)
        return joint_distance(tuple(x[1:] for x in path), tuple(x[:-1] for x in path))

    @staticmethod
    def equilibrium_variation(sequence: GameSequence, horizon: int) -> float:
        return float(np.sum(MetricsService.equilibrium_steps(sequence, horizon)))

    @staticmethod
    def cumulative_equilibrium_variation(sequence: GameSequence, horizon: int) -> np.ndarray:
        return np.cumsum(MetricsService.equilibrium_steps(sequence, horizon))

    @staticmethod
    def bregman_to_ne(trace: RunTrace, realized: bool = False) -> np.ndarray:
        """n ↦ D(x*, X_n) summed over players, x* the limit game's equilibrium."""
        sequence = trace.sequence
        MetricsService._require_unique(sequence)
        target = EquilibriumService.limit_equilibrium(sequence)
        return sum(
            reg.bregman(p, x)
            for reg, p, x in zip(trace.regularizers, target, trace.played(realized))
        )

    @staticmethod
    def ergodic_average(trace: RunTrace, realized: bool = False) -> Profile:
        """x̄_n = Σ_{k≤n} γ_k X_k / Σ_{k≤n} γ_k for every n."""
        weights = np.cumsum(trace.steps)[:, None]
        return tuple(np.cumsum(trace.steps[:, None] * x, axis=0) / weights for x in trace.played(realized))

    # Rates and bounds

    @staticmethod
    def fit_rate(series, window=None, index=None) -> RateFit:
        return fit_rate(series, window=window, index=index)

    @staticmethod
    def gradient_bound(sequence: GameSequence, regularizers: Sequence) -> float:
        """Bound on the joint dual norm of V_n over the run."""
        base = sequence.base
        if isinstance(base, OnlineLinear):
            bound = float(np.max(joint_dual_norm((np.atleast_2d(base.coefficients),), regularizers)))
        else:
            bound = base.bound
        if sequence.kind == SequenceKind.STABILIZING:
            bound += float(sequence.stabilization_bound(1))
        return bound

    @staticmethod
    def second_moment(sequence: GameSequence, regularizers: Sequence, noise: NoiseSchedule) -> float:
        """s̄ with s̄² bounding E‖v̂_n‖*² at the first stage (schedules are non-increasing in the bias)."""
        bound = MetricsService.gradient_bound(sequence, regularizers)
        return float(np.sqrt(noise.second_moment_bound(1, bound)))

    @staticmethod
    def regret_bound(horizon: int, step: float, depth: float, modulus: float, diameter: float,
                     biases=0.0, second_moments=0.0) -> float:
        """
        2H/γ + 2 diam Σ b_n + γ/(2K) Σ s̄_n² for a constant step γ.

        ``biases`` and ``second_moments`` (s̄_n, not squared) are scalars or per-stage arrays.
        """
        biases = np.broadcast_to(np.asarray(biases, dtype=float), (horizon,))
        moments = np.broadcast_to(np.asarray(second_moments, dtype=float), (horizon,))
        return float(2.0 * depth / step + 2.0 * diameter * np.sum(biases)
                     + step / (2.0 * modulus) * np.sum(np.square(moments)))

    @staticmethod
    def tuned_regret_bound(horizon: int, second_moment: float, modulus: float, depth: float) -> float:
        """2 s̄ √((H/K) T), the bound at the tuned step."""
        return float(2.0 * second_moment * np.sqrt(depth / modulus * horizon))

    @staticmethod
    def predicted_exponent(target: str, exponents: dict) -> Optional[float]:
        """
        Growth exponent of the cumulative series a target measures.

        None for targets that measure convergence rather than growth.
        """
        if target not in Target.values:
            raise ConfigurationError(ErrorMessages.UNKNOWN_TARGET.format(target=target))
        p = exponents.get('p', 0.0)
        v = exponents.get('v', 0.0)
        if target == Target.REGRET:
            return 0.5
        if target in (Target.TRACKING, Target.DYNAMIC_REGRET):
            s = exponents.get('s', 0.0)
            lb = exponents.get('lb')
            candidates = [1 + 2 * s - p, 2 * p - 2 * s + v]
            if lb is not None:
                candidates.append(1 - lb)
            return float(max(candidates))
        if target == Target.BANDIT_TRACKING:
            q = exponents['q']
            return float(max(1 + 2 * q - p, 1 - q, 2 * p - 2 * q + v))
        return None
