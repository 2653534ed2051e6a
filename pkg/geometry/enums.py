"""
Enums and constants for the mirror-descent geometry.
"""
from django.db import models


class SetKind(models.TextChoices):
    """Supported compact convex action sets"""
    SIMPLEX = 'simplex', 'Probability Simplex'
    BOX = 'box', 'Box'
    BALL = 'ball', 'Euclidean Ball'


class RegularizerKind(models.TextChoices):
    """Supported distance-generating functions"""
    EUCLIDEAN = 'euclidean', 'Euclidean (half squared norm)'
    ENTROPIC = 'entropic', 'Entropic (negative Gibbs entropy)'


class GeometryConstants:
    """Numerical tolerances shared by sets and regularizers"""

    MEMBERSHIP_TOL = 1e-12
    IDENTITY_TOL = 1e-10
    ENTROPIC_FLOOR = 1e-300
    PROPERTY_SAMPLES = 10_000


class ErrorMessages:
    """Centralized error messages"""

    SIMPLEX_DIMENSION = "Simplex dimension must be at least 2, got {d}"
    BOX_BOUNDS = "Box bounds must satisfy lower < upper in every coordinate"
    BOX_SHAPE = "Box bounds must be 1-D arrays of equal length"
    BALL_RADIUS = "Ball radius must be positive, got {radius}"
    BALL_CENTER = "Ball center must be finite"
    SHAPE_MISMATCH = "Expected a vector of dimension {expected}, got shape {shape}"
    NOT_IN_SET = "Point is not in the {kind} action set"
    NOT_IN_PROX_DOMAIN = "Point is outside the prox-domain of the {kind} regularizer"
    NON_FINITE_DUAL = "Dual vector must be finite"
    ENTROPIC_NEEDS_SIMPLEX = "The entropic regularizer is only defined on simplices, got {kind}"
    UNKNOWN_REGULARIZER = "Unknown regularizer kind '{kind}'"
