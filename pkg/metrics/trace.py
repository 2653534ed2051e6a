"""
Per-stage record of a learning run.
"""
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from project.exceptions import InputError
from games.sequences import GameSequence
from geometry.profiles import Profile
from .enums import ErrorMessages


class RunTrace:
    """
    Arrays indexed by stage (row s is stage n = s + 1).

    ``actions`` holds X_n, ``realized`` the played X̂_n of bandit runs. The
    true gradients V_n(X_n) are cached when the oracle reported them and are
    recomputed from the sequence otherwise.
    """

    def __init__(self, sequence: GameSequence, regularizers: Sequence, horizon: int, seed: int,
                 bandit: bool = False):
        dimensions = sequence.base.dimensions
        self.sequence = sequence
        self.regularizers = tuple(regularizers)
        self.seed = int(seed)
        self.bandit = bandit
        self.actions: Profile = tuple(np.empty((horizon, d)) for d in dimensions)
        self.realized: Optional[Profile] = tuple(np.empty((horizon, d)) for d in dimensions) if bandit else None
        self._gradients: Optional[Profile] = tuple(np.empty((horizon, d)) for d in dimensions)
        self.steps = np.empty(horizon)
        self.deltas = np.empty(horizon) if bandit else None
        self.bias_norms = np.zeros(horizon)
        self.noise_norms = np.zeros(horizon)

    @property
    def horizon(self) -> int:
        return self.steps.shape[0]

    @property
    def players(self) -> int:
        return len(self.actions)

    @property
    def stages(self) -> np.ndarray:
        return np.arange(1, self.horizon + 1)

    def record(self, n: int, actions: Profile, signal, gamma: float, delta: Optional[float] = None):
        row = n - 1
        for i, x in enumerate(actions):
            self.actions[i][row] = x
        if self.bandit:
            for i, x in enumerate(signal.realized):
                self.realized[i][row] = x
            self.deltas[row] = delta
        if signal.true_gradient is None:
            self._gradients = None
        elif self._gradients is not None:
            for i, v in enumerate(signal.true_gradient):
                self._gradients[i][row] = v
        self.steps[row] = gamma
        self.bias_norms[row] = signal.bias_norm
        self.noise_norms[row] = signal.noise_norm

    @property
    def gradients(self) -> Profile:
        """V_n(X_n) for every stage."""
        if self._gradients is None:
            self._gradients = self.sequence.stage_batch(self.stages).gradient(self.actions)
        return self._gradients

    def played(self, realized: bool = False) -> Profile:
        if realized and self.bandit:
            return self.realized
        return self.actions

    def window(self, window: Optional[Tuple[int, int]] = None) -> slice:
        """Rows for the inclusive stage window (start, end); the whole run by default."""
        if window is None:
            return slice(0, self.horizon)
        start, end = window
        if not 1 <= start <= end <= self.horizon:
            raise InputError(ErrorMessages.WINDOW.format(window=window, horizon=self.horizon))
        return slice(start - 1, end)

    def to_frame(self) -> pd.DataFrame:
        columns = {'n': self.stages, 'gamma': self.steps}
        if self.bandit:
            columns['delta'] = self.deltas
        for i, x in enumerate(self.actions):
            for k in range(x.shape[1]):
                columns[f'x{i}_{k}'] = x[:, k]
        if self.bandit:
            for i, x in enumerate(self.realized):
                for k in range(x.shape[1]):
                    columns[f'xhat{i}_{k}'] = x[:, k]
        frame = pd.DataFrame(columns)
        frame['bias_norm'] = self.bias_norms
        frame['noise_norm'] = self.noise_norms
        return frame
