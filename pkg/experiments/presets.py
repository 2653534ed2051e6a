"""
Shipped experiment configs, one per reproduced guarantee.

Each preset is a raw config document, exactly what a JSON config file would
hold; ``expected`` ranges are checked against the summary after the run.
"""
import copy
import difflib

from project.exceptions import ConfigurationError
from .enums import ErrorMessages

NETWORK_ANCHORS = [[0.4, 0.5], [0.5, 0.6], [0.7, 0.4]]
TEN_SEEDS = list(range(10))

PRESETS = {
    'regret-sqrt': {
        'name': 'regret-sqrt',
        'description': 'Online linear payoffs on the 10-simplex, entropic weights, tuned constant step',
        'target': 'regret',
        'game': {'family': 'online_linear', 'coefficients': [k / 9 for k in range(10)]},
        'regularizer': 'entropic',
        'learner': {
            'kind': 'gradient',
            'step': {'kind': 'tuned_constant'},
            'noise': {'sigma0': 1.0},
        },
        'horizon': 100_000,
        'horizons': [1_000, 10_000, 100_000],
        'seeds': list(range(20)),
        'expected': {
            'slope.regret': [0.4, 0.6],
            'mean.regret_bound_ratio': [0.0, 1.0],
        },
    },
    'converge-stable': {
        'name': 'converge-stable',
        'description': 'Stabilizing three-player quadratic network with unbiased noise and steps n^-0.9',
        'target': 'convergence',
        'game': {'family': 'quadratic_network', 'mu': 1.0, 'beta': 0.2, 'anchors': NETWORK_ANCHORS},
        'sequence': {'kind': 'stabilizing', 'v': 0.5, 'beta0': 0.3},
        'regularizer': 'euclidean',
        'learner': {
            'kind': 'gradient',
            'step': {'kind': 'power', 'gamma0': 1.0, 'p': 0.9},
            'noise': {'sigma0': 0.5},
        },
        'horizon': 200_000,
        'seeds': TEN_SEEDS,
        'expected': {
            'mean.distance_ratio': [0.0, 0.05],
            'mean.bregman_tail_spread': [0.0, 0.02],
        },
    },
    'tracking-v05': {
        'name': 'tracking-v05',
        'description': 'Drifting three-player quadratic network, V(T) ~ T^0.5, steps n^-1/6',
        'target': 'tracking',
        'game': {'family': 'quadratic_network', 'mu': 1.0, 'beta': 0.2, 'anchors': NETWORK_ANCHORS},
        'sequence': {'kind': 'drifting', 'v': 0.5, 'scale': 0.05, 'radius': 0.1},
        'regularizer': 'euclidean',
        'learner': {
            'kind': 'gradient',
            'step': {'kind': 'power', 'gamma0': 1.0, 'p': 1 / 6},
            'noise': {'sigma0': 0.5},
        },
        'horizon': 100_000,
        'seeds': TEN_SEEDS,
        'expected': {'slope.tracking_error': [0.713, 0.953]},
    },
    'dynreg-v05': {
        'name': 'dynreg-v05',
        'description': 'Single-player drifting quadratic payoffs, dynamic regret at steps n^-1/6',
        'target': 'dynamic_regret',
        'game': {'family': 'quadratic_network', 'mu': 1.0, 'beta': 0.0, 'anchors': [[0.5, 0.5]]},
        'sequence': {'kind': 'drifting', 'v': 0.5, 'scale': 0.05, 'radius': 0.1},
        'regularizer': 'euclidean',
        'learner': {
            'kind': 'gradient',
            'step': {'kind': 'power', 'gamma0': 1.0, 'p': 1 / 6},
            'noise': {'sigma0': 0.5},
        },
        'horizon': 100_000,
        'seeds': TEN_SEEDS,
        'expected': {'slope.dynamic_regret': [0.713, 0.953]},
    },
    'bandit-tracking-v05': {
        'name': 'bandit-tracking-v05',
        'description': 'Payoff-based learning in a drifting two-player network, p=0.3 and q=0.1',
        'target': 'bandit_tracking',
        'game': {'family': 'quadratic_network', 'mu': 1.0, 'beta': 0.2, 'anchors': NETWORK_ANCHORS[:2]},
        'sequence': {'kind': 'drifting', 'v': 0.5, 'scale': 0.05, 'radius': 0.1},
        'regularizer': 'euclidean',
        'learner': {
            'kind': 'bandit',
            'step': {'kind': 'power', 'gamma0': 0.1, 'p': 0.3},
            'spsa': {'delta0': 0.1, 'q': 0.1},
        },
        'horizon': 200_000,
        'seeds': TEN_SEEDS,
        'expected': {'slope.tracking_error_hat': [0.75, 1.05]},
    },
    'bandit-converge': {
        'name': 'bandit-converge',
        'description': 'Payoff-based learning in a static two-player network, q=0.2 and p=0.9',
        'target': 'bandit_convergence',
        'game': {'family': 'quadratic_network', 'mu': 1.0, 'beta': 0.2, 'anchors': NETWORK_ANCHORS[:2]},
        'regularizer': 'euclidean',
        'learner': {
            'kind': 'bandit',
            'step': {'kind': 'power', 'gamma0': 1.0, 'p': 0.9},
            'spsa': {'delta0': 0.1, 'q': 0.2},
        },
        'horizon': 200_000,
        'seeds': TEN_SEEDS,
        'expected': {'mean.distance_ratio_hat': [0.0, 0.05]},
    },
    'zerosum-ergodic': {
        'name': 'zerosum-ergodic',
        'description': 'Biased matching pennies, multiplicative weights with steps n^-0.8 and exact gradients',
        'target': 'ergodic',
        'game': {'family': 'bilinear_zero_sum', 'matrix': [[1.2, -1.0], [-1.0, 1.0]]},
        'regularizer': 'entropic',
        'learner': {
            'kind': 'gradient',
            'step': {'kind': 'power', 'gamma0': 1.0, 'p': 0.8},
        },
        'horizon': 100_000,
        'seeds': [0],
        'expected': {
            'mean.ergodic_saddle_gap': [0.0, 0.02],
            'mean.last_iterate_gap_max': [0.1, 100.0],
        },
    },
}


def preset_names():
    return sorted(PRESETS)


def get_preset(name: str) -> dict:
    """Deep copy of a preset; unknown names raise with the nearest match."""
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        matches = difflib.get_close_matches(name, PRESETS.keys(), n=1)
        if matches:
            raise ConfigurationError(ErrorMessages.UNKNOWN_PRESET_SUGGESTION.format(name=name, suggestion=matches[0]))
        raise ConfigurationError(ErrorMessages.UNKNOWN_PRESET.format(name=name))
