"""
Turn a validated config echo into domain objects.
"""
import numpy as np

from games.enums import GameFamily, SequenceKind
from games.families import BilinearZeroSum, KellyAuction, OnlineLinear, QuadraticNetwork, StageGame
from games.sequences import GameSequence
from learner.enums import StepKind
from learner.schedules import StepSchedule
from learner.services import LearnerService
from metrics.services import MetricsService
from oracles.schedules import NoiseSchedule, SpsaConfig
from .enums import LearnerKind


def build_game(game: dict) -> StageGame:
    family = game['family']
    if family == GameFamily.BILINEAR_ZERO_SUM:
        return BilinearZeroSum(game['matrix'])
    if family == GameFamily.KELLY_AUCTION:
        return KellyAuction(game['gains'], game['capacity'], game['barrier'], game['budgets'])
    if family == GameFamily.QUADRATIC_NETWORK:
        return QuadraticNetwork(
            game['mu'], game['beta'], game['anchors'], lower=game.get('lower', 0.0), upper=game.get('upper', 1.0)
        )
    return OnlineLinear(game['coefficients'])


def build_sequence(config: dict) -> GameSequence:
    game = build_game(config['game'])
    sequence = config.get('sequence') or {'kind': SequenceKind.STATIC}
    if sequence['kind'] == SequenceKind.STABILIZING:
        return GameSequence.stabilizing(game, sequence['v'], sequence['beta0'])
    if sequence['kind'] == SequenceKind.DRIFTING:
        return GameSequence.drifting(game, sequence['v'], sequence['scale'], sequence['radius'])
    return GameSequence.static(game)


def build_noise(config: dict) -> NoiseSchedule:
    noise = config['learner'].get('noise') or {}
    return NoiseSchedule(
        b0=noise.get('b0', 0.0), lb=noise.get('lb'), sigma0=noise.get('sigma0', 0.0), s=noise.get('s', 0.0)
    )


def build_spsa(config: dict) -> SpsaConfig:
    spsa = config['learner']['spsa']
    return SpsaConfig(spsa['delta0'], spsa['q'])


def tuning_inputs(config: dict, sequence: GameSequence, horizon: int) -> dict:
    """K, H and s̄ of the joint regularizer for the tuned constant step and the regret bound."""
    regularizers = LearnerService.regularizers_for(config['regularizer'], sequence.action_sets)
    depth = sum(reg.depth(s) for reg, s in zip(regularizers, sequence.action_sets))
    return {
        'horizon': horizon,
        'second_moment': MetricsService.second_moment(sequence, regularizers, build_noise(config)),
        'modulus': 1.0,
        'depth': depth,
    }


def build_steps(config: dict, sequence: GameSequence, horizon: int) -> StepSchedule:
    step = config['learner']['step']
    if step['kind'] == StepKind.TUNED_CONSTANT:
        return StepSchedule.tuned_constant(**tuning_inputs(config, sequence, horizon))
    if step['kind'] == StepKind.POWER:
        return StepSchedule.power(step['gamma0'], step['p'])
    if step['kind'] == StepKind.INVERSE_LOG:
        return StepSchedule.inverse_log(step['gamma0'])
    return StepSchedule.constant(step['gamma0'])


def exponents(config: dict) -> dict:
    """The schedule exponents a config fixes; v is infinite for static sequences."""
    sequence = config.get('sequence') or {'kind': SequenceKind.STATIC}
    learner = config['learner']
    step = learner['step']
    noise = learner.get('noise') or {}
    values = {
        'p': step.get('p', 0.0) if step['kind'] == StepKind.POWER else 0.0,
        'v': sequence.get('v', np.inf) if sequence['kind'] != SequenceKind.STATIC else np.inf,
        's': noise.get('s', 0.0),
        'lb': noise.get('lb') if noise.get('b0', 0.0) > 0 else None,
    }
    if learner.get('kind') == LearnerKind.BANDIT:
        values['q'] = learner['spsa']['q']
    return values
