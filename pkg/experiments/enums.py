"""
Enums and choices for the experiments app.
Centralizes run statuses, artefact formats and the exponent rules.
"""
from django.db import models


class LearnerKind(models.TextChoices):
    """Feedback model of a run"""
    GRADIENT = 'gradient', 'Gradient Feedback'
    BANDIT = 'bandit', 'Payoff-Based (SPSA)'


class RunStatus(models.TextChoices):
    """Status of an experiment or of one seed"""
    PENDING = 'pending', 'Pending'
    RUNNING = 'running', 'Running'
    COMPLETED = 'completed', 'Completed'
    PARTIAL = 'partial', 'Partially Completed'
    FAILED = 'failed', 'Failed'


class ExperimentConstants:
    """Artefact formats and validation rules"""

    CSV_HEADER = '# prox-games trace v1'
    SUMMARY_SCHEMA = 'prox-games summary v1'
    FLOAT_FORMAT = '%.12g'
    SUMMARY_FILE = 'summary.json'
    SERIES_POINTS = 200

    # Strict exponent inequalities hold with this margin
    EXPONENT_MARGIN = 0.05
    EXPONENT_TOL = 1e-12

    DEFAULT_SEEDS = [0]


class ErrorMessages:
    """Centralized error messages for consistency"""

    UNKNOWN_PRESET = "Unknown preset '{name}'"
    UNKNOWN_PRESET_SUGGESTION = "Unknown preset '{name}'. Did you mean '{suggestion}'?"
    CONFIG_UNREADABLE = "Cannot read config file '{path}': {reason}"
    CONFIG_INVALID = "Invalid experiment config: {errors}"
    NO_CONFIG = "Give a config path or --preset"
    NOT_A_TRACE = "{path} is not a prox-games trace (header {header!r})"
    SEEDS_COUNT = "--seeds must be at least 1, got {count}"

    WRONG_LEARNER = "Target '{target}' needs a {kind} learner"
    STEP_KIND = "Target '{target}' needs a {kinds} step schedule, got '{kind}'"
    NEEDS_DRIFT = "Target '{target}' needs a drifting sequence with v < 1"
    NEEDS_BILINEAR = "Target '{target}' is only defined for the bilinear zero-sum family"
    NEEDS_UNIQUE = "Target '{target}' needs a game with a unique equilibrium"
    EXPONENT_RANGE = "Exponent {name}={value:.4g} must lie in {interval}"
    EXPONENT_BOUND = "Step exponent p={p:.4g} must exceed {bound:.4g} + {margin} ({terms})"
    UNCHECKED = "Proceeding with unchecked exponents: {errors}"

    SEED_FAILED = "Seed {seed} (T={horizon}) failed: {error}"
    RUN_NOT_FOUND = "Experiment run not found"
    CERTIFICATE_FAILED = "Sampled certificates failed; see the lines above"


class ResponseMessages:
    """Centralized success messages for consistency"""

    CONFIG_VALID = "Config is valid"
    CONFIG_VALID_WITH_WARNINGS = "Config is valid with {count} warning(s)"
    CERTIFIED = "All sampled certificates hold"
    RUN_FINISHED = "Experiment '{name}' finished with status {status}; artefacts in {path}"
