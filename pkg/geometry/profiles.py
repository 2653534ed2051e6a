"""
Helpers for action profiles and dual vectors.

A profile is a tuple with one array per player. Arrays are ``(d_i,)`` for a
single profile or ``(S, d_i)`` for a batch of S stages. Joint norms follow
‖x‖² = Σ_i ‖x_i‖_i².
"""
from typing import Sequence, Tuple

import numpy as np

Profile = Tuple[np.ndarray, ...]


def as_profile(values) -> Profile:
    return tuple(np.asarray(v, dtype=float) for v in values)


def copy_profile(profile: Profile) -> Profile:
    return tuple(np.array(x, dtype=float) for x in profile)


def joint_inner(y: Profile, x: Profile):
    """Σ_i <y_i, x_i>, batched over a leading stage axis."""
    return sum(np.sum(yi * xi, axis=-1) for yi, xi in zip(y, x))


def joint_norm(x: Profile, regularizers: Sequence) -> np.ndarray:
    return np.sqrt(sum(reg.norm(xi) ** 2 for reg, xi in zip(regularizers, x)))


def joint_dual_norm(y: Profile, regularizers: Sequence) -> np.ndarray:
    return np.sqrt(sum(reg.dual_norm(yi) ** 2 for reg, yi in zip(regularizers, y)))


def joint_distance(x: Profile, x_other: Profile) -> np.ndarray:
    """Euclidean distance between profiles (or batches of profiles)."""
    return np.sqrt(sum(np.sum(np.square(a - b), axis=-1) for a, b in zip(x, x_other)))


def profile_sub(x: Profile, x_other: Profile) -> Profile:
    return tuple(a - b for a, b in zip(x, x_other))


def flatten(profile: Profile) -> np.ndarray:
    return np.concatenate([np.asarray(x, dtype=float) for x in profile], axis=-1)


def split(flat: np.ndarray, dimensions: Sequence[int]) -> Profile:
    edges = np.cumsum(dimensions)[:-1]
    return tuple(np.split(np.asarray(flat, dtype=float), edges, axis=-1))
