"""
Enums and constants for feedback oracles.
"""
from django.db import models


class FeedbackKind(models.TextChoices):
    """What the players observe after each stage"""
    GRADIENT = 'gradient', 'Stochastic First-Order Oracle'
    BANDIT = 'bandit', 'Payoff-Based (SPSA)'


class ErrorMessages:
    """Centralized error messages"""

    NEGATIVE_MAGNITUDE = "Noise parameters b0, sigma0 and s must be non-negative"
    BIAS_EXPONENT = "Bias exponent lb must be non-negative (or null for an unbiased oracle), got {lb}"
    SPSA_EXPONENT = "SPSA exponent q must lie in (0, 1], got {q}"
    SPSA_DELTA = "SPSA radius delta0 must be positive, got {delta0}"
    SPSA_SAFETY = "SPSA radius delta0={delta0} must stay below the smallest safety radius {radius:.6g}"
