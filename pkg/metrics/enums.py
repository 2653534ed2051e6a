"""
Enums and constants for figures of merit.
"""
from django.db import models


class Target(models.TextChoices):
    """Which guarantee an experiment reproduces"""
    REGRET = 'regret', 'Static Regret'
    CONVERGENCE = 'convergence', 'Convergence Under Stabilization'
    TRACKING = 'tracking', 'Equilibrium Tracking'
    DYNAMIC_REGRET = 'dynamic_regret', 'Dynamic Regret'
    BANDIT_TRACKING = 'bandit_tracking', 'Payoff-Based Tracking'
    BANDIT_CONVERGENCE = 'bandit_convergence', 'Payoff-Based Convergence'
    ERGODIC = 'ergodic', 'Ergodic Saddle-Point Convergence'


class MetricConstants:
    """Inner solvers and fits"""

    INNER_MAX_ITERS = 500
    INNER_TOL = 1e-8
    FIT_TAIL = 0.5


class ErrorMessages:
    """Centralized error messages"""

    NON_POSITIVE_SERIES = "Rate fits need a strictly positive series on the fit window"
    FIT_POINTS = "Rate fits need at least two points, got {count}"
    NO_UNIQUE_EQUILIBRIUM = "Tracking metrics need a sequence with unique equilibria, got {monotonicity} games"
    UNKNOWN_TARGET = "No predicted exponent for target '{target}'"
    WINDOW = "Window {window} is outside stages 1..{horizon}"
