"""
Distance-generating functions and their prox-mappings.

A regularizer is stateless: every set-dependent quantity takes the
``ActionSet`` explicitly. Methods broadcast over leading axes so property
checks can evaluate thousands of instances at once.
"""
import numpy as np
from scipy.special import kl_div, xlogy

from project.exceptions import ConfigurationError, GeometryDomainError, InputError
from .enums import RegularizerKind, SetKind, GeometryConstants, ErrorMessages
from .sets import ActionSet


class Regularizer:
    """Base class: h, its gradient selection, D(p, x) and prox(x, y)."""

    kind = None
    modulus = 1.0

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def bregman(self, p, x):
        return self.value(p) - self.value(x) - np.sum(self.gradient(x) * (p - x), axis=-1)

    def prox(self, action_set: ActionSet, x, y, check: bool = True):
        raise NotImplementedError

    def minimizer(self, action_set: ActionSet) -> np.ndarray:
        raise NotImplementedError

    def depth(self, action_set: ActionSet) -> float:
        raise NotImplementedError

    def norm(self, x):
        raise NotImplementedError

    def dual_norm(self, y):
        raise NotImplementedError

    def in_prox_domain(self, action_set: ActionSet, x) -> bool:
        return action_set.contains(x)

    def require_prox_domain(self, action_set: ActionSet, x) -> np.ndarray:
        x = action_set.check_shape(x)
        if not self.in_prox_domain(action_set, x):
            raise GeometryDomainError(ErrorMessages.NOT_IN_PROX_DOMAIN.format(kind=self.kind))
        return x

    @staticmethod
    def require_finite(y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if not np.all(np.isfinite(y)):
            raise InputError(ErrorMessages.NON_FINITE_DUAL)
        return y

    def __repr__(self):
        return f"{type(self).__name__}()"


class EuclideanRegularizer(Regularizer):
    """h(x) = ½‖x‖₂², not recentred per set; prox is the Euclidean projection of x + y."""

    kind = RegularizerKind.EUCLIDEAN

    def value(self, x):
        return 0.5 * np.sum(np.square(x), axis=-1)

    def gradient(self, x):
        return np.asarray(x, dtype=float)

    def bregman(self, p, x):
        return 0.5 * np.sum(np.square(np.asarray(p) - np.asarray(x)), axis=-1)

    def prox(self, action_set, x, y, check=True):
        if check:
            x = self.require_prox_domain(action_set, x)
            y = self.require_finite(y)
        return action_set.project(x + y)

    def minimizer(self, action_set):
        return action_set.project(np.zeros(action_set.dimension))

    def depth(self, action_set):
        if action_set.kind == SetKind.SIMPLEX:
            highest = 0.5
        elif action_set.kind == SetKind.BOX:
            highest = 0.5 * np.sum(np.maximum(action_set.lower ** 2, action_set.upper ** 2))
        else:
            highest = 0.5 * (np.linalg.norm(action_set.center) + action_set.radius) ** 2
        return float(highest - self.value(self.minimizer(action_set)))

    def norm(self, x):
        return np.linalg.norm(x, axis=-1)

    def dual_norm(self, y):
        return np.linalg.norm(y, axis=-1)


class EntropicRegularizer(Regularizer):
    """Negative Gibbs entropy on the simplex; prox is the multiplicative-weights update.

    Primal norm ℓ1, dual norm ℓ∞, modulus 1 (Pinsker), depth log d.
    """

    kind = RegularizerKind.ENTROPIC
    floor = GeometryConstants.ENTROPIC_FLOOR

    @staticmethod
    def _require_simplex(action_set):
        if action_set.kind != SetKind.SIMPLEX:
            raise ConfigurationError(ErrorMessages.ENTROPIC_NEEDS_SIMPLEX.format(kind=action_set.kind))

    def value(self, x):
        return np.sum(xlogy(x, x), axis=-1)

    def gradient(self, x):
        return 1.0 + np.log(x)

    def bregman(self, p, x):
        return np.sum(kl_div(p, x), axis=-1)

    def in_prox_domain(self, action_set, x):
        x = np.asarray(x, dtype=float)
        return action_set.contains(x) and bool(np.all(x >= self.floor))

    def prox(self, action_set, x, y, check=True):
        if check:
            self._require_simplex(action_set)
            x = self.require_prox_domain(action_set, x)
            y = self.require_finite(y)
        scores = np.log(x) + y
        scores -= np.max(scores, axis=-1, keepdims=True)
        weights = np.exp(scores)
        weights /= np.sum(weights, axis=-1, keepdims=True)
        weights = np.maximum(weights, self.floor)
        return weights / np.sum(weights, axis=-1, keepdims=True)

    def minimizer(self, action_set):
        self._require_simplex(action_set)
        return action_set.barycenter()

    def depth(self, action_set):
        self._require_simplex(action_set)
        return float(np.log(action_set.dimension))

    def norm(self, x):
        return np.sum(np.abs(x), axis=-1)

    def dual_norm(self, y):
        return np.max(np.abs(y), axis=-1)


REGULARIZERS = {
    RegularizerKind.EUCLIDEAN: EuclideanRegularizer,
    RegularizerKind.ENTROPIC: EntropicRegularizer,
}


def get_regularizer(kind: str) -> Regularizer:
    try:
        return REGULARIZERS[kind]()
    except KeyError:
        raise ConfigurationError(ErrorMessages.UNKNOWN_REGULARIZER.format(kind=kind))


def regularizer_for(kind: str, action_set: ActionSet) -> Regularizer:
    """Build a regularizer and check it is defined on ``action_set``."""
    regularizer = get_regularizer(kind)
    if regularizer.kind == RegularizerKind.ENTROPIC:
        EntropicRegularizer._require_simplex(action_set)
    return regularizer
