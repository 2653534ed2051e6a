"""
Stage-game families.

Family parameters may carry a leading stage axis (e.g. anchors of shape
``(S, d)``); payoffs and gradients then broadcast against profiles whose
per-player arrays are ``(S, d_i)``. Metrics rely on this to evaluate whole
windows of a run at once.
"""
import copy
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve

from project.exceptions import ConfigurationError, UnsupportedGameError
from geometry.profiles import Profile
from geometry.sets import ActionSet
from .enums import GameFamily, Monotonicity, GameConstants, ErrorMessages
from .solvers import projected_gradient_ascent


def _one_hot_argmax(values: np.ndarray) -> np.ndarray:
    """Vertex maximizing a linear functional over the simplex, lowest index on ties."""
    index = np.argmax(values, axis=-1)
    return np.eye(values.shape[-1])[index]


class StageGame:
    """A concave game: action sets, payoffs u_i, individual gradients V_i and metadata."""

    family = None
    monotonicity = Monotonicity.MONOTONE

    def __init__(self, action_sets: Sequence[ActionSet]):
        self.action_sets = tuple(action_sets)

    @property
    def players(self) -> int:
        return len(self.action_sets)

    @property
    def dimensions(self) -> Tuple[int, ...]:
        return tuple(s.dimension for s in self.action_sets)

    @property
    def bound(self) -> float:
        """B: sup of ‖V(x)‖ over the joint action space."""
        raise NotImplementedError

    @property
    def lipschitz(self) -> float:
        """Λ: Lipschitz constant of V."""
        raise NotImplementedError

    @property
    def strong_modulus(self) -> float:
        return 0.0

    def payoff(self, i: int, profile: Profile):
        raise NotImplementedError

    def player_gradient(self, i: int, profile: Profile):
        return self.gradient(profile)[i]

    def gradient(self, profile: Profile) -> Profile:
        return tuple(self.player_gradient(i, profile) for i in range(self.players))

    @staticmethod
    def deviate(profile: Profile, i: int, action) -> Profile:
        """Replace player i's action, broadcasting a fixed action against a batch."""
        return profile[:i] + (np.broadcast_to(action, np.broadcast_shapes(np.shape(action), np.shape(profile[i]))),) + profile[i + 1:]

    def best_response(self, i: int, profile: Profile) -> np.ndarray:
        """argmax of u_i(·; x_{-i}), batched over stages; generic fallback is projected ascent."""
        action_set = self.action_sets[i]
        step = 1.0 / max(self.lipschitz, 1e-12)
        return projected_gradient_ascent(
            lambda xi: self.player_gradient(i, self.deviate(profile, i, xi)),
            action_set.project,
            np.array(profile[i], dtype=float),
            step,
            label=f"{self.family} best response",
        )

    def summed_best_response(self, i: int, profile: Profile) -> Optional[np.ndarray]:
        """Closed-form argmax of Σ_s u_{i,s}(x_i; x_{-i,s}) over a stage batch, if one exists."""
        return None

    def closed_form_equilibrium(self) -> Profile:
        raise UnsupportedGameError(ErrorMessages.NO_CLOSED_FORM.format(family=self.family))

    def describe(self) -> dict:
        return {
            'family': self.family,
            'players': self.players,
            'dimensions': list(self.dimensions),
            'monotonicity': self.monotonicity,
            'bound': self.bound,
            'lipschitz': self.lipschitz,
            'strong_modulus': self.strong_modulus,
        }


class BilinearZeroSum(StageGame):
    """u_1 = -x_1ᵀ A x_2 = -u_2 on two simplices."""

    family = GameFamily.BILINEAR_ZERO_SUM
    monotonicity = Monotonicity.MONOTONE

    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or min(matrix.shape) < 2 or not np.all(np.isfinite(matrix)):
            raise ConfigurationError(ErrorMessages.BILINEAR_MATRIX)
        matrix.setflags(write=False)
        self.matrix = matrix
        super().__init__((ActionSet.simplex(matrix.shape[0]), ActionSet.simplex(matrix.shape[1])))

    @property
    def bound(self):
        column = np.max(np.linalg.norm(self.matrix, axis=0))
        row = np.max(np.linalg.norm(self.matrix, axis=1))
        return float(np.hypot(column, row))

    @property
    def lipschitz(self):
        return float(np.linalg.norm(self.matrix, 2))

    def value(self, profile: Profile):
        """f(x_1, x_2) = x_1ᵀ A x_2, the amount player 1 pays."""
        return np.einsum('...i,ij,...j->...', profile[0], self.matrix, profile[1])

    def payoff(self, i, profile):
        value = self.value(profile)
        return -value if i == 0 else value

    def player_gradient(self, i, profile):
        if i == 0:
            return -(profile[1] @ self.matrix.T)
        return profile[0] @ self.matrix

    def best_response(self, i, profile):
        return _one_hot_argmax(self.player_gradient(i, profile))

    def summed_best_response(self, i, profile):
        summed = np.sum(np.atleast_2d(self.player_gradient(i, profile)), axis=0)
        return _one_hot_argmax(summed)


class KellyAuction(StageGame):
    """Proportional allocation: u_i = g_i q x_i / (c + Σ_j x_j) - x_i on [0, b_i]."""

    family = GameFamily.KELLY_AUCTION
    monotonicity = Monotonicity.MONOTONE

    def __init__(self, gains, capacity: float, barrier: float, budgets):
        gains = np.atleast_1d(np.asarray(gains, dtype=float))
        budgets = np.broadcast_to(np.asarray(budgets, dtype=float), gains.shape).copy()
        if not barrier > 0:
            raise ConfigurationError(ErrorMessages.KELLY_BARRIER.format(barrier=barrier))
        if capacity <= 0 or np.any(gains <= 0) or np.any(budgets <= 0):
            raise ConfigurationError(ErrorMessages.KELLY_POSITIVE)
        self.gains, self.capacity, self.barrier, self.budgets = gains, float(capacity), float(barrier), budgets
        super().__init__(tuple(ActionSet.box([0.0], [b]) for b in budgets))

    @property
    def bound(self):
        return float(np.linalg.norm(np.maximum(self.gains * self.capacity / self.barrier, 1.0)))

    @property
    def lipschitz(self):
        return float(np.max(self.gains) * self.capacity * (self.players + 1) / self.barrier ** 2)

    def _total(self, profile):
        return self.barrier + sum(profile)

    def payoff(self, i, profile):
        total = self._total(profile)
        return (self.gains[i] * self.capacity * profile[i] / total - profile[i])[..., 0]

    def player_gradient(self, i, profile):
        total = self._total(profile)
        return self.gains[i] * self.capacity * (total - profile[i]) / total ** 2 - 1.0

    def best_response(self, i, profile):
        rest = self._total(profile) - profile[i]
        return np.clip(np.sqrt(self.gains[i] * self.capacity * rest) - rest, 0.0, self.budgets[i])

    def closed_form_equilibrium(self):
        if self.players != 1:
            return super().closed_form_equilibrium()
        return (self.best_response(0, (np.zeros(1),)),)


class QuadraticNetwork(StageGame):
    """
    u_i = -(μ/2)‖x_i - θ_i‖² - β <x_i, Σ_{j≠i} x_j> on boxes.

    Strongly monotone with modulus μ - |β|(N-1); anchors θ_i may carry a stage axis.
    """

    family = GameFamily.QUADRATIC_NETWORK
    monotonicity = Monotonicity.STRONG

    def __init__(self, mu: float, beta: float, anchors, lower=0.0, upper=1.0):
        anchors = tuple(np.asarray(a, dtype=float) for a in anchors)
        players = len(anchors)
        dimension = anchors[0].shape[-1] if players else 0
        if players == 0 or any(a.shape[-1] != dimension for a in anchors):
            raise ConfigurationError(ErrorMessages.QUADRATIC_ANCHORS.format(dimension=dimension))
        if not mu > 0 or abs(beta) * (players - 1) >= mu:
            raise ConfigurationError(ErrorMessages.QUADRATIC_COUPLING.format(
                beta=beta, players_minus_one=players - 1, mu=mu))
        self.mu, self.beta, self.anchors = float(mu), float(beta), anchors
        self.lower = np.broadcast_to(np.asarray(lower, dtype=float), (dimension,)).copy()
        self.upper = np.broadcast_to(np.asarray(upper, dtype=float), (dimension,)).copy()
        box = ActionSet.box(self.lower, self.upper)
        super().__init__((box,) * players)

    def with_anchors(self, anchors) -> 'QuadraticNetwork':
        """Same network with new anchors; the coupling check does not depend on them."""
        stage = copy.copy(self)
        stage.anchors = tuple(np.asarray(a, dtype=float) for a in anchors)
        return stage

    @property
    def coupling(self) -> float:
        return abs(self.beta) * (self.players - 1)

    @property
    def bound(self):
        reach = np.maximum(np.abs(self.lower), np.abs(self.upper))
        total = 0.0
        for anchor in self.anchors:
            spread = np.maximum(np.abs(self.lower - anchor), np.abs(self.upper - anchor))
            spread = spread.reshape(-1, spread.shape[-1]).max(axis=0)
            total += np.sum(np.square(self.mu * spread + self.coupling * reach))
        return float(np.sqrt(total))

    @property
    def lipschitz(self):
        return self.mu + self.coupling

    @property
    def strong_modulus(self):
        return self.mu - self.coupling

    def interaction_matrix(self) -> np.ndarray:
        """μI + β(𝟙𝟙ᵀ - I); the equilibrium solves it against μθ coordinate-wise."""
        n = self.players
        return self.mu * np.eye(n) + self.beta * (np.ones((n, n)) - np.eye(n))

    def payoff(self, i, profile):
        others = sum(profile) - profile[i]
        return (
            -0.5 * self.mu * np.sum(np.square(profile[i] - self.anchors[i]), axis=-1)
            - self.beta * np.sum(profile[i] * others, axis=-1)
        )

    def player_gradient(self, i, profile):
        others = sum(profile) - profile[i]
        return -self.mu * (profile[i] - self.anchors[i]) - self.beta * others

    def best_response(self, i, profile):
        others = sum(profile) - profile[i]
        return np.clip(self.anchors[i] - (self.beta / self.mu) * others, self.lower, self.upper)

    def summed_best_response(self, i, profile):
        others = sum(profile) - profile[i]
        target = np.broadcast_to(self.anchors[i] - (self.beta / self.mu) * others, np.shape(others))
        return np.clip(np.mean(np.atleast_2d(target), axis=0), self.lower, self.upper)

    def closed_form_equilibrium(self):
        anchors = np.broadcast_arrays(*self.anchors)
        stacked = np.stack(anchors, axis=0)
        flat = stacked.reshape(self.players, -1)
        solution = solve(self.interaction_matrix(), self.mu * flat, assume_a='sym').reshape(stacked.shape)
        tol = GameConstants.MONOTONICITY_TOL
        if np.any(solution < self.lower - tol) or np.any(solution > self.upper + tol):
            raise UnsupportedGameError(ErrorMessages.NOT_INTERIOR.format(family=self.family))
        return tuple(np.clip(solution[i], self.lower, self.upper) for i in range(self.players))


class OnlineLinear(StageGame):
    """Single player on the simplex with u(x) = <c, x>."""

    family = GameFamily.ONLINE_LINEAR
    monotonicity = Monotonicity.MONOTONE

    def __init__(self, coefficients):
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.ndim < 1 or coefficients.shape[-1] < 2 or not np.all(np.isfinite(coefficients)):
            raise ConfigurationError(ErrorMessages.LINEAR_COEFFICIENTS)
        self.coefficients = coefficients
        super().__init__((ActionSet.simplex(coefficients.shape[-1]),))

    @property
    def bound(self):
        return float(np.max(np.linalg.norm(np.atleast_2d(self.coefficients), axis=-1)))

    @property
    def lipschitz(self):
        return 0.0

    def payoff(self, i, profile):
        return np.sum(self.coefficients * profile[0], axis=-1)

    def player_gradient(self, i, profile):
        return np.broadcast_to(self.coefficients, np.broadcast_shapes(np.shape(self.coefficients), np.shape(profile[0])))

    def best_response(self, i, profile):
        return _one_hot_argmax(self.player_gradient(i, profile))

    def summed_best_response(self, i, profile):
        return _one_hot_argmax(np.sum(np.atleast_2d(self.player_gradient(i, profile)), axis=0))

    def closed_form_equilibrium(self):
        return (_one_hot_argmax(self.coefficients),)


class PerturbedGame(StageGame):
    """
    Base game plus the stabilizing term -w Σ_k cos(πx_ik + φ)/(π√D).

    Its gradient adds w·P_i(x) with P_i(x) = sin(πx_i + φ)/√D, so ‖P‖ ≤ 1 and
    max_x ‖V_n(x) - V(x)‖ = w up to the grid.
    """

    family = GameFamily.PERTURBED

    def __init__(self, base: StageGame, weight, phase: float = GameConstants.DEFAULT_PHASE):
        self.base = base
        self.weight = np.asarray(weight, dtype=float)
        self.phase = float(phase)
        self.scale = 1.0 / np.sqrt(sum(base.dimensions))
        super().__init__(base.action_sets)

    @property
    def monotonicity(self):
        return self.base.monotonicity

    @property
    def curvature(self) -> float:
        return float(np.pi * self.scale * np.max(np.abs(self.weight)))

    @property
    def bound(self):
        return self.base.bound + float(np.max(np.abs(self.weight)))

    @property
    def lipschitz(self):
        return self.base.lipschitz + self.curvature

    @property
    def strong_modulus(self):
        return max(self.base.strong_modulus - self.curvature, 0.0)

    def payoff(self, i, profile):
        # weight is a scalar or a (S, 1) column
        weight = self.weight[..., 0] if self.weight.ndim else self.weight
        ripple = np.sum(np.cos(np.pi * profile[i] + self.phase), axis=-1) / np.pi
        return self.base.payoff(i, profile) - weight * self.scale * ripple

    def perturbation(self, i, profile):
        return self.scale * np.sin(np.pi * profile[i] + self.phase)

    def player_gradient(self, i, profile):
        return self.base.player_gradient(i, profile) + self.weight * self.perturbation(i, profile)
