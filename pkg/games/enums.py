"""
Enums and constants for stage games and game sequences.
"""
from django.db import models


class GameFamily(models.TextChoices):
    """Concrete stage-game families"""
    BILINEAR_ZERO_SUM = 'bilinear_zero_sum', 'Bilinear Zero-Sum'
    KELLY_AUCTION = 'kelly_auction', 'Kelly Auction'
    QUADRATIC_NETWORK = 'quadratic_network', 'Quadratic Network'
    ONLINE_LINEAR = 'online_linear', 'Online Linear'
    PERTURBED = 'perturbed', 'Perturbed (stabilizing)'


class Monotonicity(models.TextChoices):
    """Monotonicity class of the joint gradient field"""
    MONOTONE = 'monotone', 'Monotone'
    STRICT = 'strict', 'Strictly Monotone'
    STRONG = 'strong', 'Strongly Monotone'


class SequenceKind(models.TextChoices):
    """How stage games evolve over time"""
    STATIC = 'static', 'Static'
    STABILIZING = 'stabilizing', 'Stabilizing'
    DRIFTING = 'drifting', 'Drifting'


class GameConstants:
    """Solver and certificate settings"""

    ASCENT_MAX_ITERS = 500
    ASCENT_TOL = 1e-8
    CONCAVITY_TOL = 1e-9
    MONOTONICITY_TOL = 1e-12
    FD_STEP = 1e-5
    FD_RELATIVE_TOL = 1e-6
    DEFAULT_PHASE = 0.25 * 3.141592653589793


class ErrorMessages:
    """Centralized error messages"""

    KELLY_BARRIER = "Kelly auctions need a positive entry barrier c, got {barrier}"
    KELLY_POSITIVE = "Kelly gains, capacity and budgets must be positive"
    QUADRATIC_COUPLING = "Quadratic network needs |beta|(N-1) < mu, got |{beta}|*{players_minus_one} >= {mu}"
    QUADRATIC_ANCHORS = "Quadratic network needs one anchor of dimension {dimension} per player"
    BILINEAR_MATRIX = "Bilinear zero-sum games need a finite 2-D payoff matrix with at least two rows and columns"
    LINEAR_COEFFICIENTS = "Online linear games need a finite 1-D coefficient vector of length >= 2"
    PERTURBATION_TOO_LARGE = (
        "Stabilizing perturbation beta0*pi/sqrt(D)={curvature:.4g} must stay below the base strong-monotonicity "
        "modulus {modulus:.4g}"
    )
    DRIFT_NEEDS_QUADRATIC = "Drifting sequences are only defined for the quadratic network family"
    DRIFT_PARAMETERS = "Drifting sequences need 0 < v < 1, scale > 0 and radius > 0"
    STABILIZING_PARAMETERS = "Stabilizing sequences need v > 0 and beta0 >= 0"
    STAGE_INDEX = "Stage index must be >= 1, got {n}"
    NO_CLOSED_FORM = "No closed-form equilibrium for the {family} family"
    NOT_INTERIOR = "Closed-form equilibrium for the {family} family is not interior; use the extragradient oracle"
    NO_LIMIT = "Drifting sequences have no limit game"
