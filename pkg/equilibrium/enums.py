"""
Enums and constants for the Nash-equilibrium oracles.
"""
from django.db import models


class SolveMethod(models.TextChoices):
    """How an equilibrium point was obtained"""
    CLOSED_FORM = 'closed_form', 'Closed Form'
    EXTRAGRADIENT = 'extragradient', 'Extragradient (last iterate)'
    EXTRAGRADIENT_ERGODIC = 'extragradient_ergodic', 'Extragradient (ergodic average)'


class EquilibriumConstants:
    """Oracle tolerances"""

    TOLERANCE = 1e-10
    MAX_ITERS = 200_000
    MINTY_SAMPLES = 10_000
    CERTIFICATE_TOL = 1e-8
    LOG_EVERY = 10_000


class ErrorMessages:
    """Centralized error messages"""

    NOT_BILINEAR = "The saddle gap is only defined for bilinear zero-sum games, got {family}"
    EXTRAGRADIENT_STALLED = "Extragradient did not reach the requested residual for the {family} family"
