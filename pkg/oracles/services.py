"""
Feedback oracles: noisy gradients and one-point payoff-based estimates.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from games.families import StageGame
from geometry.profiles import Profile, split
from .schedules import NoiseSchedule, SpsaGeometry
from .signals import FeedbackSignal
from .streams import RandomStreams

logger = logging.getLogger(__name__)


class OracleService:
    """Stochastic first-order and SPSA feedback for one stage of play"""

    @staticmethod
    def bias_direction(dimensions: Sequence[int], streams: RandomStreams) -> Profile:
        """Unit joint direction û for the systematic error, drawn once per run."""
        direction = streams.auxiliary.standard_normal(sum(dimensions))
        direction /= np.linalg.norm(direction)
        return split(direction, dimensions)

    @staticmethod
    def sample_noise(schedule: NoiseSchedule, n, dimensions: Sequence[int], streams: RandomStreams,
                     size: Optional[int] = None) -> Profile:
        """σ_n z/√D with z standard normal over all D joint coordinates, so E‖noise‖² = σ_n²."""
        scale = schedule.sigma(n) / np.sqrt(sum(dimensions))
        shape = () if size is None else (size,)
        return tuple(scale * streams[i].standard_normal(shape + (d,)) for i, d in enumerate(dimensions))

    @staticmethod
    def sfo_feedback(game: StageGame, x: Profile, schedule: NoiseSchedule, n: int, streams: RandomStreams,
                     direction: Optional[Profile] = None) -> FeedbackSignal:
        """v̂ = V_n(x) + b_n û + σ_n z/√D."""
        gradient = game.gradient(x)
        if schedule.is_perfect:
            return FeedbackSignal(signal=gradient, true_gradient=gradient)
        bias = None
        if not schedule.unbiased:
            bias = tuple(schedule.bias(n) * u for u in direction)
        noise = OracleService.sample_noise(schedule, n, game.dimensions, streams)
        signal = tuple(
            v + e + (bias[i] if bias is not None else 0.0)
            for i, (v, e) in enumerate(zip(gradient, noise))
        )
        return FeedbackSignal(signal=signal, true_gradient=gradient, bias=bias, noise=noise)

    @staticmethod
    def spsa_query(x, base_point, radius: float, delta: float, direction):
        """X̂ = (1 - δ/r) x + (δ/r)(p + r Z)."""
        ratio = delta / radius
        return (1.0 - ratio) * np.asarray(x) + ratio * (base_point + radius * np.asarray(direction))

    @staticmethod
    def spsa_estimate(payoff, direction, factor: int, delta: float):
        """v̂ = (k/δ) û Z."""
        return (factor / delta) * np.asarray(payoff)[..., None] * direction

    @staticmethod
    def draw_directions(geometry: SpsaGeometry, streams: RandomStreams, size: Optional[int] = None) -> Profile:
        """Z_i uniform on {±w_1, ..., ±w_k} for each player's perturbation basis."""
        directions = []
        for i, basis in enumerate(geometry.bases):
            draw = streams[i].integers(2 * basis.shape[0], size=size)
            sign = np.where(draw % 2 == 0, 1.0, -1.0)
            directions.append(sign[..., None] * basis[draw // 2])
        return tuple(directions)

    @staticmethod
    def spsa_feedback(game: StageGame, x: Profile, geometry: SpsaGeometry, n: int, streams: RandomStreams,
                      size: Optional[int] = None, diagnostics: bool = True) -> FeedbackSignal:
        """
        Play a perturbed action and turn the observed payoffs into a gradient estimate.

        With ``size`` the oracle draws that many independent queries at the
        same candidate action (Monte-Carlo checks of the estimator).
        """
        delta = float(geometry.delta(n))
        directions = OracleService.draw_directions(geometry, streams, size)
        realized = tuple(
            OracleService.spsa_query(xi, p, r, delta, z)
            for xi, p, r, z in zip(x, geometry.base_points, geometry.radii, directions)
        )
        payoffs = np.array([game.payoff(i, realized) for i in range(game.players)])
        signal = tuple(
            OracleService.spsa_estimate(payoffs[i], z, k, delta)
            for i, (z, k) in enumerate(zip(directions, geometry.factors))
        )
        if not diagnostics:
            return FeedbackSignal(signal=signal, realized=realized, payoffs=payoffs)
        gradient = game.gradient(x)
        error = tuple(v_hat - v for v_hat, v in zip(signal, gradient))
        return FeedbackSignal(signal=signal, realized=realized, true_gradient=gradient, noise=error, payoffs=payoffs)
