"""
Enums and constants for the learning dynamics.
"""
from django.db import models


class StepKind(models.TextChoices):
    """Step-size policies"""
    CONSTANT = 'constant', 'Constant'
    POWER = 'power', 'Power Law (gamma0 * n^-p)'
    INVERSE_LOG = 'inverse_log', 'Inverse Logarithm (gamma0 / log(n + e))'
    TUNED_CONSTANT = 'tuned_constant', 'Tuned Constant (static regret)'


class LearnerConstants:
    """Run-loop settings"""

    PROGRESS_EVERY = 50_000


class ErrorMessages:
    """Centralized error messages"""

    STEP_POSITIVE = "Step size gamma0 must be positive, got {gamma0}"
    STEP_EXPONENT = "Power step exponent p must lie in (0, 1], got {p}"
    UNKNOWN_STEP = "Unknown step-size kind '{kind}'"
    HORIZON = "Horizon must be at least 1, got {horizon}"
    TUNING_INPUTS = "Tuned constant steps need a positive horizon, second-moment bound, modulus and depth"
    NON_FINITE_SIGNAL = "Received a non-finite feedback signal"
