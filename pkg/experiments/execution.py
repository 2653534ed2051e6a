"""
One (seed, horizon) job: build, run, measure, write the trace CSV.

Jobs are independent and own their output file, so the orchestrator can run
them in worker processes. ``run_job`` never raises; failures come back as a
result with status ``failed``.
"""
import logging
from typing import Dict, Tuple

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError

from equilibrium.services import EquilibriumService
from games.enums import SequenceKind
from geometry.enums import RegularizerKind
from geometry.profiles import joint_distance
from learner.enums import StepKind
from learner.services import LearnerService
from metrics.enums import Target
from metrics.services import MetricsService
from metrics.trace import RunTrace
from .builders import build_noise, build_sequence, build_spsa, build_steps, tuning_inputs
from .enums import LearnerKind, RunStatus, ErrorMessages
from .persistence import write_trace

logger = logging.getLogger(__name__)

# Cumulative series whose growth exponent each target estimates
FIT_SERIES = {
    Target.TRACKING: ('tracking_error',),
    Target.DYNAMIC_REGRET: ('dynamic_regret',),
    Target.BANDIT_TRACKING: ('tracking_error_hat', 'tracking_error'),
}

# Headline metrics fitted against the horizon in a sweep
HORIZON_FITS = {
    Target.REGRET: ('regret', 'gap'),
}


def error_text(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        return '; '.join(exc.messages)
    return f"{type(exc).__name__}: {exc}"


def run_trace(config: dict, seed: int, horizon: int) -> RunTrace:
    sequence = build_sequence(config)
    steps = build_steps(config, sequence, horizon)
    if config['learner']['kind'] == LearnerKind.BANDIT:
        return LearnerService.run_bandit(sequence, config['regularizer'], steps, build_spsa(config), horizon, seed)
    return LearnerService.run_gradient(sequence, config['regularizer'], steps, build_noise(config), horizon, seed)


def joint_diameter(trace: RunTrace) -> float:
    return float(np.sqrt(sum(s.diameter() ** 2 for s in trace.sequence.action_sets)))


def regret_bound(config: dict, trace: RunTrace) -> float:
    """The constant-step static regret bound for this run."""
    inputs = tuning_inputs(config, trace.sequence, trace.horizon)
    if config['learner']['step']['kind'] == StepKind.TUNED_CONSTANT:
        return MetricsService.tuned_regret_bound(**inputs)
    noise = build_noise(config)
    ns = trace.stages
    gradient_bound = MetricsService.gradient_bound(trace.sequence, trace.regularizers)
    # ℓ1 diameter of the simplex under the entropic regularizer
    diameter = 2.0 if config['regularizer'] == RegularizerKind.ENTROPIC else joint_diameter(trace)
    return MetricsService.regret_bound(
        trace.horizon,
        float(trace.steps[0]),
        inputs['depth'],
        inputs['modulus'],
        diameter,
        noise.bias(ns),
        np.sqrt(noise.second_moment_bound(ns, gradient_bound)),
    )


def measure(config: dict, trace: RunTrace) -> Tuple[Dict[str, np.ndarray], Dict[str, float], Dict[str, np.ndarray]]:
    """
    Extra CSV columns, headline metrics and cumulative series of one trace.
    """
    target = config['target']
    sequence = trace.sequence
    bandit = trace.bandit
    columns, metrics, series = {}, {}, {}
    tail = trace.window((max(trace.horizon // 2, 1), trace.horizon))

    if sequence.unique_equilibrium:
        columns['sq_err'] = MetricsService.squared_tracking_errors(trace)
        series['tracking_error'] = np.cumsum(columns['sq_err'])
        metrics['tracking_error'] = float(series['tracking_error'][-1])
        if bandit:
            columns['sq_err_hat'] = MetricsService.squared_tracking_errors(trace, realized=True)
            series['tracking_error_hat'] = np.cumsum(columns['sq_err_hat'])
            metrics['tracking_error_hat'] = float(series['tracking_error_hat'][-1])

    gaps = [MetricsService.cumulative_gap(trace, i) for i in range(trace.players)]
    for i, gap in enumerate(gaps):
        columns[f'gap{i}'] = gap
    series['gap'] = np.sum(gaps, axis=0)
    metrics['gap'] = float(max(gap[-1] for gap in gaps))

    if target in (Target.TRACKING, Target.DYNAMIC_REGRET):
        regrets = [MetricsService.cumulative_dynamic_regret(trace, i) for i in range(trace.players)]
        for i, regret in enumerate(regrets):
            columns[f'dynreg{i}'] = regret
        series['dynamic_regret'] = np.sum(regrets, axis=0)
        metrics['dynamic_regret'] = float(series['dynamic_regret'][-1])

    if sequence.unique_equilibrium and sequence.kind != SequenceKind.DRIFTING:
        columns['breg_ne'] = MetricsService.bregman_to_ne(trace)
        series['breg_ne'] = columns['breg_ne']
        tail_values = columns['breg_ne'][tail]
        metrics['bregman_tail_spread'] = float(tail_values.max() - tail_values.min())
        limit = EquilibriumService.limit_equilibrium(sequence)
        diameter = joint_diameter(trace)
        final = LearnerService.final_actions(trace)
        metrics['final_distance'] = float(joint_distance(final, limit))
        metrics['distance_ratio'] = metrics['final_distance'] / diameter
        if bandit:
            final_hat = LearnerService.final_actions(trace, realized=True)
            metrics['final_distance_hat'] = float(joint_distance(final_hat, limit))
            metrics['distance_ratio_hat'] = metrics['final_distance_hat'] / diameter

    if target == Target.REGRET:
        metrics['regret'] = float(max(MetricsService.static_regret(trace, i) for i in range(trace.players)))
        metrics['regret_bound'] = regret_bound(config, trace)
        metrics['regret_bound_ratio'] = metrics['regret'] / metrics['regret_bound']

    if target == Target.ERGODIC:
        game = sequence.limit_game()
        columns['ergodic_gap'] = EquilibriumService.saddle_gap(game, MetricsService.ergodic_average(trace))
        columns['saddle_gap'] = EquilibriumService.saddle_gap(game, trace.actions)
        series['ergodic_gap'] = columns['ergodic_gap']
        series['saddle_gap'] = columns['saddle_gap']
        metrics['ergodic_saddle_gap'] = float(columns['ergodic_gap'][-1])
        metrics['last_iterate_gap_max'] = float(columns['saddle_gap'][tail].max())

    return columns, metrics, series


def trace_frame(trace: RunTrace, columns: Dict[str, np.ndarray]) -> pd.DataFrame:
    """Trace columns, then the measured ones, then the diagnostics."""
    frame = trace.to_frame()
    diagnostics = frame[['bias_norm', 'noise_norm']]
    frame = frame.drop(columns=['bias_norm', 'noise_norm'])
    return pd.concat([frame, pd.DataFrame(columns), diagnostics], axis=1)


def run_job(config: dict, seed: int, horizon: int, csv_path: str) -> dict:
    """Run one seed; failures are reported in the result, not raised."""
    result = {'seed': seed, 'horizon': horizon, 'csv_path': '', 'metrics': {}, 'series': {}}
    try:
        trace = run_trace(config, seed, horizon)
        columns, metrics, series = measure(config, trace)
        write_trace(trace_frame(trace, columns), csv_path)
    except Exception as exc:
        error = error_text(exc)
        logger.warning(ErrorMessages.SEED_FAILED.format(seed=seed, horizon=horizon, error=error))
        result.update(status=RunStatus.FAILED, error=error)
        return result
    result.update(status=RunStatus.COMPLETED, error='', csv_path=str(csv_path), metrics=metrics, series=series)
    return result
