from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from geometry.profiles import Profile


def _norm(profile: Optional[Profile]) -> float:
    if profile is None:
        return 0.0
    return float(np.sqrt(sum(np.sum(np.square(v)) for v in profile)))


@dataclass(frozen=True)
class FeedbackSignal:
    """
    What a stage of play returns.

    ``signal`` is the only field the learner may read. ``realized`` is the
    action actually played (SPSA only). The rest is bookkeeping for the
    metrics: the true gradient at the candidate action and the realized
    systematic and random errors.
    """

    signal: Profile
    realized: Optional[Profile] = None
    true_gradient: Optional[Profile] = None
    bias: Optional[Profile] = None
    noise: Optional[Profile] = None
    payoffs: Optional[np.ndarray] = None

    @property
    def bias_norm(self) -> float:
        return _norm(self.bias)

    @property
    def noise_norm(self) -> float:
        return _norm(self.noise)

    def stripped(self) -> 'FeedbackSignal':
        """Same signal without diagnostics."""
        return replace(self, true_gradient=None, bias=None, noise=None, payoffs=None)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(v)) for v in self.signal)
