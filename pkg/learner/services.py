"""
Prox-learning with gradient feedback and its payoff-based (SPSA) variant.
"""
import logging
from typing import Sequence

import numpy as np

from project.exceptions import ConfigurationError, RunAbortedError
from games.sequences import GameSequence
from geometry.regularizers import Regularizer, regularizer_for
from geometry.sets import ActionSet
from metrics.trace import RunTrace
from oracles.schedules import NoiseSchedule, SpsaConfig
from oracles.services import OracleService
from oracles.signals import FeedbackSignal
from oracles.streams import RandomStreams
from .enums import LearnerConstants, ErrorMessages
from .schedules import StepSchedule
from .state import RunState

logger = logging.getLogger(__name__)


class LearnerService:
    """The learning loop: observe a signal, then take one prox step per player"""

    @staticmethod
    def regularizers_for(kind: str, action_sets: Sequence[ActionSet]):
        return tuple(regularizer_for(kind, s) for s in action_sets)

    @staticmethod
    def initial_state(regularizers: Sequence[Regularizer], action_sets: Sequence[ActionSet]) -> RunState:
        """X_1 = argmin h, player by player."""
        return RunState(n=1, actions=tuple(reg.minimizer(s) for reg, s in zip(regularizers, action_sets)))

    @staticmethod
    def prox_learn_step(state: RunState, regularizers: Sequence[Regularizer], action_sets: Sequence[ActionSet],
                        feedback: FeedbackSignal, gamma: float) -> RunState:
        """X_{i,n+1} = prox_i(X_{i,n}, γ_n v̂_{i,n}); only ``feedback.signal`` is read."""
        if not feedback.is_finite():
            raise RunAbortedError(ErrorMessages.NON_FINITE_SIGNAL, stage=state.n)
        actions = tuple(
            reg.prox(action_set, x, gamma * v, check=False)
            for reg, action_set, x, v in zip(regularizers, action_sets, state.actions, feedback.signal)
        )
        return RunState(n=state.n + 1, actions=actions, realized=feedback.realized)

    @staticmethod
    def _check_horizon(horizon: int):
        if int(horizon) < 1:
            raise ConfigurationError(ErrorMessages.HORIZON.format(horizon=horizon))

    @staticmethod
    def run_gradient(sequence: GameSequence, regularizer: str, steps: StepSchedule, noise: NoiseSchedule,
                     horizon: int, seed: int, strip_diagnostics: bool = False) -> RunTrace:
        """T stages of prox-learning with stochastic first-order feedback."""
        LearnerService._check_horizon(horizon)
        action_sets = sequence.action_sets
        regularizers = LearnerService.regularizers_for(regularizer, action_sets)
        streams = RandomStreams(seed, sequence.players)
        direction = None if noise.unbiased else OracleService.bias_direction(sequence.base.dimensions, streams)
        state = LearnerService.initial_state(regularizers, action_sets)
        trace = RunTrace(sequence, regularizers, horizon, seed)
        logger.debug("gradient run: seed=%d horizon=%d", seed, horizon)

        for n in range(1, horizon + 1):
            feedback = OracleService.sfo_feedback(sequence.stage(n), state.actions, noise, n, streams, direction)
            if strip_diagnostics:
                feedback = feedback.stripped()
            gamma = steps.gamma(n)
            trace.record(n, state.actions, feedback, gamma)
            state = LearnerService.prox_learn_step(state, regularizers, action_sets, feedback, gamma)
            if n % LearnerConstants.PROGRESS_EVERY == 0:
                logger.debug("seed %d: stage %d of %d", seed, n, horizon)
        return trace

    @staticmethod
    def run_bandit(sequence: GameSequence, regularizer: str, steps: StepSchedule, spsa: SpsaConfig,
                   horizon: int, seed: int, strip_diagnostics: bool = False) -> RunTrace:
        """T stages of payoff-based prox-learning: perturb, play, observe payoffs, estimate, step."""
        LearnerService._check_horizon(horizon)
        action_sets = sequence.action_sets
        regularizers = LearnerService.regularizers_for(regularizer, action_sets)
        geometry = spsa.resolve(action_sets)
        streams = RandomStreams(seed, sequence.players)
        state = LearnerService.initial_state(regularizers, action_sets)
        trace = RunTrace(sequence, regularizers, horizon, seed, bandit=True)
        logger.debug("bandit run: seed=%d horizon=%d", seed, horizon)

        for n in range(1, horizon + 1):
            feedback = OracleService.spsa_feedback(
                sequence.stage(n), state.actions, geometry, n, streams, diagnostics=not strip_diagnostics
            )
            gamma = steps.gamma(n)
            trace.record(n, state.actions, feedback, gamma, delta=float(geometry.delta(n)))
            state = LearnerService.prox_learn_step(state, regularizers, action_sets, feedback, gamma)
            if n % LearnerConstants.PROGRESS_EVERY == 0:
                logger.debug("seed %d: stage %d of %d", seed, n, horizon)
        return trace

    @staticmethod
    def final_actions(trace: RunTrace, realized: bool = False):
        """The last stage of X_n, or of X̂_n with ``realized`` on a bandit run."""
        return tuple(np.array(x[-1]) for x in trace.played(realized))
