"""
Time-varying games G_n built from a base stage game.
"""
from typing import Optional, Sequence

import numpy as np

from project.exceptions import ConfigurationError, UnsupportedGameError
from geometry.profiles import Profile
from .enums import SequenceKind, GameFamily, Monotonicity, GameConstants, ErrorMessages
from .families import PerturbedGame, QuadraticNetwork, StageGame


class GameSequence:
    """
    Generator n ↦ G_n.

    * static: G_n = G for all n
    * stabilizing: V_n = V + β_n P with β_n = β₀ n^{-v} and ‖P‖ ≤ 1
    * drifting: quadratic-network anchors travel on circles with arc length c·n^v
    """

    def __init__(self, base: StageGame, kind: str = SequenceKind.STATIC, v: Optional[float] = None,
                 beta0: float = 0.0, scale: float = 0.0, radius: float = 0.0,
                 phase: float = GameConstants.DEFAULT_PHASE):
        self.base = base
        self.kind = kind
        self.v = v
        self.beta0 = float(beta0)
        self.scale = float(scale)
        self.radius = float(radius)
        self.phase = float(phase)
        self._validate()

    @classmethod
    def static(cls, game: StageGame) -> 'GameSequence':
        return cls(game)

    @classmethod
    def stabilizing(cls, game: StageGame, v: float, beta0: float, phase: float = GameConstants.DEFAULT_PHASE):
        return cls(game, SequenceKind.STABILIZING, v=v, beta0=beta0, phase=phase)

    @classmethod
    def drifting(cls, game: StageGame, v: float, scale: float, radius: float) -> 'GameSequence':
        return cls(game, SequenceKind.DRIFTING, v=v, scale=scale, radius=radius)

    def _validate(self):
        if self.kind == SequenceKind.STABILIZING:
            if self.v is None or self.v <= 0 or self.beta0 < 0:
                raise ConfigurationError(ErrorMessages.STABILIZING_PARAMETERS)
            curvature = PerturbedGame(self.base, self.beta0, self.phase).curvature
            if self.beta0 > 0 and curvature >= self.base.strong_modulus:
                raise ConfigurationError(ErrorMessages.PERTURBATION_TOO_LARGE.format(
                    curvature=curvature, modulus=self.base.strong_modulus))
        elif self.kind == SequenceKind.DRIFTING:
            if not isinstance(self.base, QuadraticNetwork):
                raise ConfigurationError(ErrorMessages.DRIFT_NEEDS_QUADRATIC)
            if self.v is None or not 0 < self.v < 1 or self.scale <= 0 or self.radius <= 0:
                raise ConfigurationError(ErrorMessages.DRIFT_PARAMETERS)
        elif self.kind != SequenceKind.STATIC:
            raise ConfigurationError(f"Unknown sequence kind '{self.kind}'")

    @staticmethod
    def _check_stages(ns):
        ns = np.asarray(ns, dtype=float)
        if np.any(ns < 1):
            raise ConfigurationError(ErrorMessages.STAGE_INDEX.format(n=ns.min()))
        return ns

    @property
    def players(self) -> int:
        return self.base.players

    @property
    def action_sets(self):
        return self.base.action_sets

    @property
    def unique_equilibrium(self) -> bool:
        return self.base.monotonicity in (Monotonicity.STRONG, Monotonicity.STRICT)

    def stabilization_bound(self, n):
        """β_n = max_x ‖V_n(x) - V(x)‖; zero for static sequences."""
        if self.kind == SequenceKind.DRIFTING:
            raise UnsupportedGameError(ErrorMessages.NO_LIMIT)
        ns = self._check_stages(n)
        if self.kind == SequenceKind.STATIC:
            return np.zeros_like(ns) if ns.ndim else 0.0
        return self.beta0 * ns ** (-self.v)

    def anchors_at(self, n) -> Profile:
        """θ_i(n) for a stage index or an array of indices."""
        ns = self._check_stages(n)
        players = self.base.players
        angle = (self.scale / self.radius) * ns ** self.v
        dimension = self.base.dimensions[0]
        anchors = []
        for i, anchor in enumerate(self.base.anchors):
            shift = angle + 2.0 * np.pi * i / players
            offset = np.zeros(np.shape(ns) + (dimension,))
            offset[..., 0] = self.radius * np.cos(shift)
            if dimension > 1:
                offset[..., 1] = self.radius * np.sin(shift)
            anchors.append(anchor + offset)
        return tuple(anchors)

    def stage(self, n: int) -> StageGame:
        self._check_stages(n)
        if self.kind == SequenceKind.STATIC:
            return self.base
        if self.kind == SequenceKind.STABILIZING:
            return PerturbedGame(self.base, self.stabilization_bound(n), self.phase)
        return self.base.with_anchors(self.anchors_at(n))

    def stage_batch(self, ns: Sequence[int]) -> StageGame:
        """One game whose parameters carry a leading stage axis aligned with ``ns``."""
        ns = self._check_stages(ns)
        if self.kind == SequenceKind.STATIC:
            return self.base
        if self.kind == SequenceKind.STABILIZING:
            return PerturbedGame(self.base, self.stabilization_bound(ns)[:, None], self.phase)
        return self.base.with_anchors(self.anchors_at(ns))

    def limit_game(self) -> StageGame:
        if self.kind == SequenceKind.DRIFTING:
            raise UnsupportedGameError(ErrorMessages.NO_LIMIT)
        return self.base

    def equilibrium(self, n: int) -> Profile:
        """x*_n from the stage game's closed form."""
        return self.stage(n).closed_form_equilibrium()

    def equilibrium_path(self, horizon: int) -> Profile:
        """x*_n for n = 1..horizon+1 from the family's closed form, shaped (horizon+1, d_i)."""
        if self.kind == SequenceKind.STABILIZING:
            raise UnsupportedGameError(ErrorMessages.NO_CLOSED_FORM.format(family=GameFamily.PERTURBED))
        if self.kind == SequenceKind.STATIC:
            point = self.base.closed_form_equilibrium()
            return tuple(np.tile(x, (horizon + 1, 1)) for x in point)
        return self.stage_batch(np.arange(1, horizon + 2)).closed_form_equilibrium()

    def describe(self) -> dict:
        description = {'kind': self.kind, 'game': self.base.describe()}
        if self.kind == SequenceKind.STABILIZING:
            description.update(v=self.v, beta0=self.beta0)
        elif self.kind == SequenceKind.DRIFTING:
            description.update(v=self.v, scale=self.scale, radius=self.radius)
        return description
