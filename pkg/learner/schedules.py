from dataclasses import dataclass

import numpy as np

from project.exceptions import ConfigurationError
from .enums import StepKind, ErrorMessages


@dataclass(frozen=True)
class StepSchedule:
    """
    γ_n for one run, shared by all players.

    * constant: γ_n = γ₀
    * power: γ_n = γ₀ n^{-p} (p = 1 is the Robbins-Monro policy)
    * inverse_log: γ_n = γ₀ / log(n + e)
    """

    kind: str
    gamma0: float
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in (StepKind.CONSTANT, StepKind.POWER, StepKind.INVERSE_LOG):
            raise ConfigurationError(ErrorMessages.UNKNOWN_STEP.format(kind=self.kind))
        if not self.gamma0 > 0 or not np.isfinite(self.gamma0):
            raise ConfigurationError(ErrorMessages.STEP_POSITIVE.format(gamma0=self.gamma0))
        if self.kind == StepKind.POWER and not 0 < self.p <= 1:
            raise ConfigurationError(ErrorMessages.STEP_EXPONENT.format(p=self.p))

    @classmethod
    def constant(cls, gamma: float) -> 'StepSchedule':
        return cls(StepKind.CONSTANT, gamma)

    @classmethod
    def power(cls, gamma0: float, p: float) -> 'StepSchedule':
        return cls(StepKind.POWER, gamma0, p)

    @classmethod
    def inverse_log(cls, gamma0: float) -> 'StepSchedule':
        return cls(StepKind.INVERSE_LOG, gamma0)

    @classmethod
    def tuned_constant(cls, horizon: int, second_moment: float, modulus: float, depth: float) -> 'StepSchedule':
        """γ = (2/s̄)√(KH/T), the step minimizing the constant-step static regret bound."""
        if min(horizon, second_moment, modulus, depth) <= 0:
            raise ConfigurationError(ErrorMessages.TUNING_INPUTS)
        return cls.constant(2.0 / second_moment * np.sqrt(modulus * depth / horizon))

    def gamma(self, n):
        n = np.asarray(n, dtype=float)
        if self.kind == StepKind.CONSTANT:
            value = np.full_like(n, self.gamma0)
        elif self.kind == StepKind.POWER:
            value = self.gamma0 * n ** (-self.p)
        else:
            value = self.gamma0 / np.log(n + np.e)
        return float(value) if value.ndim == 0 else value

    def describe(self) -> dict:
        return {'kind': self.kind, 'gamma0': self.gamma0, 'p': self.p}
