"""
Compact convex action sets: simplices, boxes and Euclidean balls.

All methods accept a single point of shape ``(d,)`` or a batch of shape
``(..., d)`` and operate along the last axis.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from project.exceptions import ConfigurationError, GeometryDomainError
from .enums import SetKind, GeometryConstants, ErrorMessages


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ActionSet:
    kind: str
    dimension: int
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    _basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind == SetKind.SIMPLEX:
            basis = null_space(np.ones((1, self.dimension))).T
        else:
            basis = np.eye(self.dimension)
        basis.setflags(write=False)
        object.__setattr__(self, '_basis', basis)

    @classmethod
    def simplex(cls, d: int) -> 'ActionSet':
        if int(d) < 2:
            raise ConfigurationError(ErrorMessages.SIMPLEX_DIMENSION.format(d=d))
        return cls(kind=SetKind.SIMPLEX, dimension=int(d))

    @classmethod
    def box(cls, lower, upper) -> 'ActionSet':
        lower, upper = np.atleast_1d(np.asarray(lower, dtype=float)), np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ConfigurationError(ErrorMessages.BOX_SHAPE)
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)) or np.any(lower >= upper):
            raise ConfigurationError(ErrorMessages.BOX_BOUNDS)
        return cls(kind=SetKind.BOX, dimension=lower.size, lower=_frozen(lower), upper=_frozen(upper))

    @classmethod
    def ball(cls, center, radius: float) -> 'ActionSet':
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if not np.all(np.isfinite(center)):
            raise ConfigurationError(ErrorMessages.BALL_CENTER)
        if not np.isfinite(radius) or radius <= 0:
            raise ConfigurationError(ErrorMessages.BALL_RADIUS.format(radius=radius))
        return cls(kind=SetKind.BALL, dimension=center.size, center=_frozen(center), radius=float(radius))

    def __repr__(self):
        if self.kind == SetKind.SIMPLEX:
            return f"ActionSet.simplex({self.dimension})"
        if self.kind == SetKind.BOX:
            return f"ActionSet.box({self.lower.tolist()}, {self.upper.tolist()})"
        return f"ActionSet.ball({self.center.tolist()}, {self.radius})"

    def check_shape(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dimension:
            raise GeometryDomainError(
                ErrorMessages.SHAPE_MISMATCH.format(expected=self.dimension, shape=x.shape)
            )
        return x

    def contains(self, x, tol: float = GeometryConstants.MEMBERSHIP_TOL) -> bool:
        """True when every point in ``x`` belongs to the set up to ``tol``."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dimension or not np.all(np.isfinite(x)):
            return False
        if self.kind == SetKind.SIMPLEX:
            return bool(np.all(x >= -tol) and np.all(np.abs(x.sum(axis=-1) - 1.0) <= tol * self.dimension))
        if self.kind == SetKind.BOX:
            return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))
        return bool(np.all(np.linalg.norm(x - self.center, axis=-1) <= self.radius + tol))

    def require(self, x) -> np.ndarray:
        x = self.check_shape(x)
        if not self.contains(x):
            raise GeometryDomainError(ErrorMessages.NOT_IN_SET.format(kind=self.kind))
        return x

    def diameter(self) -> float:
        if self.kind == SetKind.SIMPLEX:
            return float(np.sqrt(2.0))
        if self.kind == SetKind.BOX:
            return float(np.linalg.norm(self.upper - self.lower))
        return 2.0 * self.radius

    def barycenter(self) -> np.ndarray:
        if self.kind == SetKind.SIMPLEX:
            return np.full(self.dimension, 1.0 / self.dimension)
        if self.kind == SetKind.BOX:
            return 0.5 * (self.lower + self.upper)
        return np.array(self.center)

    def safety_radius(self) -> float:
        """Radius of the largest ball around the barycenter that fits in the set.

        For simplices the ball lives in the affine hull.
        """
        if self.kind == SetKind.SIMPLEX:
            d = self.dimension
            return float(1.0 / np.sqrt(d * (d - 1)))
        if self.kind == SetKind.BOX:
            return float(0.5 * np.min(self.upper - self.lower))
        return self.radius

    def perturbation_basis(self) -> np.ndarray:
        """Rows are orthonormal directions spanning the set's affine hull."""
        return self._basis

    def project(self, x) -> np.ndarray:
        """Euclidean projection, batched over leading axes."""
        x = self.check_shape(x)
        if self.kind == SetKind.BOX:
            return np.clip(x, self.lower, self.upper)
        if self.kind == SetKind.BALL:
            offset = x - self.center
            norm = np.linalg.norm(offset, axis=-1, keepdims=True)
            scale = np.where(norm > self.radius, self.radius / np.where(norm > 0, norm, 1.0), 1.0)
            return self.center + offset * scale
        # sort-based simplex projection
        d = self.dimension
        ordered = np.flip(np.sort(x, axis=-1), axis=-1)
        shifted = np.cumsum(ordered, axis=-1) - 1.0
        ranks = np.arange(1, d + 1)
        active = ordered - shifted / ranks > 0
        last = d - 1 - np.argmax(np.flip(active, axis=-1), axis=-1)
        threshold = np.take_along_axis(shifted, last[..., None], axis=-1) / (last[..., None] + 1.0)
        return np.maximum(x - threshold, 0.0)

    def support_max(self, c) -> Tuple[np.ndarray, float]:
        """Maximizer and value of <c, x> over the set; ties go to the lowest index."""
        c = self.check_shape(c)
        if self.kind == SetKind.SIMPLEX:
            j = int(np.argmax(c))
            point = np.zeros(self.dimension)
            point[j] = 1.0
            return point, float(c[j])
        if self.kind == SetKind.BOX:
            point = np.where(c > 0, self.upper, self.lower)
            return point, float(c @ point)
        norm = np.linalg.norm(c)
        if norm == 0:
            return np.array(self.center), float(c @ self.center)
        point = self.center + self.radius * c / norm
        return point, float(c @ self.center + self.radius * norm)

    def support_values(self, c) -> np.ndarray:
        """Support function max <c, x> for a batch of linear functionals."""
        c = self.check_shape(c)
        if self.kind == SetKind.SIMPLEX:
            return np.max(c, axis=-1)
        if self.kind == SetKind.BOX:
            return np.sum(np.maximum(c * self.lower, c * self.upper), axis=-1)
        return c @ self.center + self.radius * np.linalg.norm(c, axis=-1)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        shape = (self.dimension,) if size is None else (size, self.dimension)
        if self.kind == SetKind.SIMPLEX:
            return rng.dirichlet(np.ones(self.dimension), size=size)
        if self.kind == SetKind.BOX:
            return rng.uniform(self.lower, self.upper, size=shape)
        direction = rng.standard_normal(shape)
        direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
        length = self.radius * rng.uniform(size=shape[:-1] + (1,)) ** (1.0 / self.dimension)
        return self.center + length * direction
