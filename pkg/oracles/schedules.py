"""
Noise and sampling-radius schedules.

    b_n = b₀ n^{-ℓb}      (systematic error, ``lb=None`` for an unbiased oracle)
    σ_n = σ₀ n^{s}        (zero-mean noise scale)
    δ_n = δ₀ n^{-q}       (SPSA sampling radius)
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from project.exceptions import ConfigurationError
from geometry.sets import ActionSet
from .enums import ErrorMessages


@dataclass(frozen=True)
class NoiseSchedule:
    b0: float = 0.0
    lb: Optional[float] = None
    sigma0: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if self.b0 < 0 or self.sigma0 < 0 or self.s < 0:
            raise ConfigurationError(ErrorMessages.NEGATIVE_MAGNITUDE)
        if self.lb is not None and self.lb < 0:
            raise ConfigurationError(ErrorMessages.BIAS_EXPONENT.format(lb=self.lb))

    @classmethod
    def perfect(cls) -> 'NoiseSchedule':
        return cls()

    @property
    def unbiased(self) -> bool:
        return self.lb is None or self.b0 == 0

    @property
    def is_perfect(self) -> bool:
        return self.unbiased and self.sigma0 == 0

    def bias(self, n):
        if self.unbiased:
            return np.zeros_like(np.asarray(n, dtype=float)) if np.ndim(n) else 0.0
        return self.b0 * np.asarray(n, dtype=float) ** (-self.lb)

    def sigma(self, n):
        return self.sigma0 * np.asarray(n, dtype=float) ** self.s

    def second_moment_bound(self, n, gradient_bound: float):
        """s̄_n² = M_n² + σ_n² with M_n = B + b_n bounding the mean signal."""
        return (gradient_bound + self.bias(n)) ** 2 + self.sigma(n) ** 2


@dataclass(frozen=True)
class SpsaGeometry:
    """SPSA settings resolved against the players' action sets."""

    delta0: float
    q: float
    base_points: Tuple[np.ndarray, ...]
    radii: Tuple[float, ...]
    bases: Tuple[np.ndarray, ...]
    diameters: Tuple[float, ...]

    def delta(self, n):
        return self.delta0 * np.asarray(n, dtype=float) ** (-self.q)

    @property
    def factors(self) -> Tuple[int, ...]:
        """Dimensional factor k_i, the number of perturbation directions."""
        return tuple(basis.shape[0] for basis in self.bases)

    @property
    def displacement_constant(self) -> float:
        """C with ‖X̂_n - X_n‖ ≤ C δ_n."""
        players = len(self.radii)
        return float(np.sqrt(players) * max(d / r + 1.0 for d, r in zip(self.diameters, self.radii)))


@dataclass(frozen=True)
class SpsaConfig:
    delta0: float
    q: float

    def __post_init__(self):
        if not self.delta0 > 0:
            raise ConfigurationError(ErrorMessages.SPSA_DELTA.format(delta0=self.delta0))
        if not 0 < self.q <= 1:
            raise ConfigurationError(ErrorMessages.SPSA_EXPONENT.format(q=self.q))

    def resolve(self, action_sets: Sequence[ActionSet]) -> SpsaGeometry:
        """Base points at the barycenters, safety radii from the set geometry."""
        radii = tuple(s.safety_radius() for s in action_sets)
        if self.delta0 >= min(radii):
            # δ_n is non-increasing, so stage 1 is the binding one
            raise ConfigurationError(ErrorMessages.SPSA_SAFETY.format(delta0=self.delta0, radius=min(radii)))
        return SpsaGeometry(
            delta0=self.delta0,
            q=self.q,
            base_points=tuple(s.barycenter() for s in action_sets),
            radii=radii,
            bases=tuple(s.perturbation_basis() for s in action_sets),
            diameters=tuple(s.diameter() for s in action_sets),
        )
