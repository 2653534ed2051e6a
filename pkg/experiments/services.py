"""
Experiment Services
Config parsing and validation, seed orchestration, the run registry and the summary.
"""
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import transaction

from project.exceptions import ConfigurationError
from games.enums import SequenceKind, GameConstants
from games.validators import GameCertificateValidator
from geometry.enums import GeometryConstants
from geometry.validators import GeometryPropertyValidator
from learner.services import LearnerService
from metrics.enums import Target
from metrics.services import MetricsService
from .api.serializers import ExperimentConfigSerializer
from .builders import build_noise, build_sequence, build_spsa, build_steps, exponents
from .enums import LearnerKind, RunStatus, ExperimentConstants, ErrorMessages, ResponseMessages
from .execution import FIT_SERIES, HORIZON_FITS, run_job
from .models import ExperimentRun, SeedRun
from .persistence import log_spaced_rows, trace_filename, write_summary
from .validators import ExperimentConfigValidator

logger = logging.getLogger(__name__)

UNIQUE_TARGETS = (
    Target.CONVERGENCE, Target.TRACKING, Target.DYNAMIC_REGRET, Target.BANDIT_TRACKING, Target.BANDIT_CONVERGENCE,
)


def flatten_errors(errors, prefix: str = '') -> List[str]:
    """Serializer errors as 'path.to.key: message' lines."""
    if isinstance(errors, dict):
        lines = []
        for key, value in errors.items():
            path = f"{prefix}.{key}" if prefix else key
            lines.extend(flatten_errors(value, path))
        return lines
    if isinstance(errors, list):
        if all(isinstance(item, str) for item in errors):
            return [f"{prefix}: {item}" if prefix else str(item) for item in errors]
        lines = []
        for item in errors:
            lines.extend(flatten_errors(item, prefix))
        return lines
    return [f"{prefix}: {errors}" if prefix else str(errors)]


class ExperimentService:
    """
    Runs experiment configs and keeps the run registry.
    """

    @staticmethod
    def load_config(path) -> Dict[str, Any]:
        try:
            with open(path) as handle:
                return json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(ErrorMessages.CONFIG_UNREADABLE.format(path=path, reason=e))

    @staticmethod
    def _parse(raw: Dict[str, Any]) -> Tuple[Optional[Dict[str, Any]], List[str]]:
        serializer = ExperimentConfigSerializer(data=raw)
        if not serializer.is_valid():
            return None, flatten_errors(serializer.errors)
        return json.loads(json.dumps(serializer.validated_data)), []

    @staticmethod
    def parse_config(raw: Dict[str, Any]) -> Dict[str, Any]:
        """
        Validate the document shape and return the config echo.

        The echo carries every default explicitly, so parsing it again gives
        the same echo.
        """
        config, errors = ExperimentService._parse(raw)
        if errors:
            raise ConfigurationError(ErrorMessages.CONFIG_INVALID.format(errors='; '.join(errors)))
        return config

    @staticmethod
    def _dry_build(config: Dict[str, Any]):
        """Build everything a run needs without running it."""
        sequence = build_sequence(config)
        build_steps(config, sequence, config['horizon'])
        LearnerService.regularizers_for(config['regularizer'], sequence.action_sets)
        if config['learner']['kind'] == LearnerKind.BANDIT:
            build_spsa(config).resolve(sequence.action_sets)
        else:
            build_noise(config)
        if config['target'] in UNIQUE_TARGETS and not sequence.unique_equilibrium:
            raise ConfigurationError(ErrorMessages.NEEDS_UNIQUE.format(target=config['target']))

    @staticmethod
    def validate_config(raw: Dict[str, Any]) -> Dict[str, Any]:
        """
        Full validation of a config document.

        Returns:
            Dict with is_valid, errors, warnings and the parsed config echo in data
        """
        result = {'is_valid': True, 'errors': [], 'warnings': [], 'data': None}
        config, errors = ExperimentService._parse(raw)
        if errors:
            result.update(is_valid=False, errors=errors)
            return result
        result['data'] = config

        rules = ExperimentConfigValidator.validate_exponents(config)
        result['errors'].extend(rules['errors'])
        result['warnings'].extend(rules['warnings'])
        if not result['errors']:
            try:
                ExperimentService._dry_build(config)
            except ValidationError as e:
                result['errors'].extend(e.messages)
        result['is_valid'] = not result['errors']
        return result

    @staticmethod
    def certify_config(config: Dict[str, Any], seed: int = 0) -> Dict[str, Any]:
        """
        Sampled geometry properties of each player's regularizer and the
        certificates of the configured game.

        Returns:
            Dict with per-check worst violations, their tolerances and passed
        """
        sequence = build_sequence(config)
        regularizers = LearnerService.regularizers_for(config['regularizer'], sequence.action_sets)
        checks = {}
        for i, (reg, action_set) in enumerate(zip(regularizers, sequence.action_sets)):
            for name, violation in GeometryPropertyValidator.run_all(reg, action_set, seed=seed).items():
                checks[f"player{i}.{name}"] = (violation, GeometryConstants.IDENTITY_TOL)
        tolerances = GameCertificateValidator.tolerances()
        for name, violation in GameCertificateValidator.run_all(sequence.base, seed=seed).items():
            checks[f"game.{name}"] = (violation, tolerances[name])
        if sequence.kind == SequenceKind.STABILIZING:
            rng = np.random.default_rng(seed)
            checks['game.stabilization'] = (
                GameCertificateValidator.stabilization_excess(sequence, rng), GameConstants.MONOTONICITY_TOL
            )

        results = {
            name: {'violation': float(violation), 'tolerance': tolerance, 'passed': bool(violation <= tolerance)}
            for name, (violation, tolerance) in checks.items()
        }
        failed = [name for name, result in results.items() if not result['passed']]
        if failed:
            logger.warning(f"Certificates failed for '{config['name']}': {', '.join(failed)}")
        return {'checks': results, 'passed': not failed}

    @staticmethod
    def output_directory(config: Dict[str, Any], output_dir=None) -> Path:
        if output_dir:
            return Path(output_dir)
        if config.get('output_dir'):
            return Path(config['output_dir'])
        return Path(settings.EXPERIMENT_OUTPUT_DIR) / config['name']

    @staticmethod
    def _execute(config: Dict[str, Any], jobs: List[tuple], max_workers: int) -> List[dict]:
        """Run (seed, horizon, csv_path) jobs, in worker processes when more than one worker is allowed."""
        if max_workers <= 1 or len(jobs) == 1:
            return [run_job(config, seed, horizon, path) for seed, horizon, path in jobs]
        seeds, horizons, paths = zip(*jobs)
        with ProcessPoolExecutor(max_workers=min(max_workers, len(jobs))) as executor:
            return list(executor.map(run_job, [config] * len(jobs), seeds, horizons, paths))

    @staticmethod
    def run_experiment(raw: Dict[str, Any], seeds: Optional[Sequence[int]] = None, output_dir=None,
                       preset: str = '', max_workers: Optional[int] = None) -> ExperimentRun:
        """
        Run every (horizon, seed) job of a config and write its artefacts.

        Args:
            raw: Config document (a preset or a parsed JSON file)
            seeds: Overrides the config's seeds
            output_dir: Overrides the config's output directory
            preset: Name of the preset the config came from, if any
            max_workers: Seed-level parallelism, EXPERIMENT_MAX_WORKERS by default

        Returns:
            The ExperimentRun registry row, with the summary attached

        Raises:
            ConfigurationError: If the config is invalid; no seed runs then
        """
        if seeds is not None:
            raw = dict(raw, seeds=list(seeds))
        validation = ExperimentService.validate_config(raw)
        if not validation['is_valid']:
            raise ConfigurationError(ErrorMessages.CONFIG_INVALID.format(errors='; '.join(validation['errors'])))
        config = validation['data']
        directory = ExperimentService.output_directory(config, output_dir)
        config['output_dir'] = str(directory)
        workers = max_workers or settings.EXPERIMENT_MAX_WORKERS

        horizons = config.get('horizons') or [config['horizon']]
        sweep = len(horizons) > 1
        jobs = [
            (seed, horizon, str(directory / trace_filename(seed, horizon, sweep)))
            for horizon in sorted(horizons)
            for seed in config['seeds']
        ]

        run = ExperimentRun.objects.create(
            name=config['name'],
            preset=preset,
            target=config['target'],
            config=config,
            output_dir=str(directory),
            status=RunStatus.RUNNING,
        )
        logger.info(f"Experiment {run.id} '{config['name']}' started: {len(jobs)} job(s), {workers} worker(s)")

        results = ExperimentService._execute(config, jobs, workers)
        for result in results:
            if result['status'] == RunStatus.COMPLETED:
                logger.info(f"Seed {result['seed']} (T={result['horizon']}) written to {result['csv_path']}")

        failed = sum(1 for result in results if result['status'] == RunStatus.FAILED)
        partial = failed > 0
        if failed == len(results):
            status = RunStatus.FAILED
        elif partial:
            status = RunStatus.PARTIAL
        else:
            status = RunStatus.COMPLETED
        if partial:
            logger.warning(f"Experiment {run.id} is partial: {failed} of {len(results)} job(s) failed")

        summary = SummaryBuilder.build(config, preset, results, partial)
        path = write_summary(summary, directory)

        with transaction.atomic():
            SeedRun.objects.bulk_create([
                SeedRun(
                    experiment=run,
                    seed=result['seed'],
                    horizon=result['horizon'],
                    status=result['status'],
                    error=result['error'],
                    csv_path=result['csv_path'],
                    metrics=result['metrics'],
                )
                for result in results
            ])
            run.status = status
            run.partial = partial
            run.summary = json.loads(path.read_text())
            run.save(update_fields=['status', 'partial', 'summary', 'updated_at'])

        logger.info(ResponseMessages.RUN_FINISHED.format(name=config['name'], status=status, path=directory))
        return run


class SummaryBuilder:
    """Aggregates per-seed results into the summary document"""

    @staticmethod
    def _mean_metrics(results: List[dict]) -> Dict[str, float]:
        names = sorted({name for result in results for name in result['metrics']})
        return {
            name: float(np.mean([r['metrics'][name] for r in results if name in r['metrics']]))
            for name in names
        }

    @staticmethod
    def _mean_series(results: List[dict]) -> Dict[str, np.ndarray]:
        names = sorted(set.intersection(*(set(result['series']) for result in results)))
        return {name: np.mean([result['series'][name] for result in results], axis=0) for name in names}

    @staticmethod
    def _fit(series, **kwargs) -> Optional[dict]:
        try:
            return MetricsService.fit_rate(series, **kwargs).as_dict()
        except ValidationError as e:
            logger.warning(f"Rate fit skipped: {'; '.join(e.messages)}")
            return None

    @staticmethod
    def _observed(name: str, metrics: dict, rate_fits: dict) -> Optional[float]:
        kind, _, key = name.partition('.')
        if kind == 'mean':
            return metrics.get(key)
        if kind == 'slope':
            fit = rate_fits.get(key)
            return fit['slope'] if fit else None
        return None

    @staticmethod
    def build(config: Dict[str, Any], preset: str, results: List[dict], partial: bool) -> Dict[str, Any]:
        target = config['target']
        completed = [r for r in results if r['status'] == RunStatus.COMPLETED]
        horizons = sorted({r['horizon'] for r in results})
        final_horizon = horizons[-1]

        metrics = {}
        for horizon in horizons:
            runs = [r for r in completed if r['horizon'] == horizon]
            metrics[str(horizon)] = {
                'per_seed': {str(r['seed']): r['metrics'] for r in runs},
                'mean': SummaryBuilder._mean_metrics(runs) if runs else {},
            }

        final_runs = [r for r in completed if r['horizon'] == final_horizon]
        full_series = SummaryBuilder._mean_series(final_runs) if final_runs else {}
        rows = log_spaced_rows(final_horizon)
        series = {'n': rows + 1}
        series.update({name: values[rows] for name, values in full_series.items()})

        rate_fits = {}
        for name in FIT_SERIES.get(target, ()):
            if name in full_series:
                rate_fits[name] = SummaryBuilder._fit(full_series[name])
        if len(horizons) > 1:
            for name in HORIZON_FITS.get(target, ()):
                values = [metrics[str(h)]['mean'].get(name) for h in horizons]
                if all(value is not None for value in values):
                    rate_fits[name] = SummaryBuilder._fit(values, index=horizons)
        rate_fits = {name: fit for name, fit in rate_fits.items() if fit is not None}

        checks = {}
        for name, (low, high) in sorted(config.get('expected', {}).items()):
            observed = SummaryBuilder._observed(name, metrics[str(final_horizon)]['mean'], rate_fits)
            passed = observed is not None and np.isfinite(observed) and low <= observed <= high
            checks[name] = {'range': [low, high], 'observed': observed, 'passed': bool(passed)}

        return {
            'schema': ExperimentConstants.SUMMARY_SCHEMA,
            'name': config['name'],
            'preset': preset,
            'target': target,
            'config': config,
            'seeds': [
                {'seed': r['seed'], 'horizon': r['horizon'], 'status': r['status'], 'error': r['error']}
                for r in results
            ],
            'partial': partial,
            'metrics': metrics,
            'series': series,
            'rate_fits': rate_fits,
            'predicted_exponent': MetricsService.predicted_exponent(target, exponents(config)),
            'checks': checks,
        }
