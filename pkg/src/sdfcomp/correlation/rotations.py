"""Deterministic rotation samples for the per-rotation translation sweep."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.transform import Rotation

from .pose import _from_scipy, _to_scipy, quat_normalize

# irrational constants of the super-Fibonacci spiral (Alexa, CVPR 2022)
_PHI = math.sqrt(2.0)
_PSI = 1.533751168755204288118041


def super_fibonacci(count: int) -> np.ndarray:
    """``count`` well-spread unit quaternions (w, x, y, z)."""
    s = np.arange(count) + 0.5
    r = np.sqrt(s / count)
    R = np.sqrt(1.0 - s / count)
    alpha = 2 * np.pi * s / _PHI
    beta = 2 * np.pi * s / _PSI
    q = np.stack([r * np.sin(alpha), r * np.cos(alpha), R * np.sin(beta), R * np.cos(beta)], axis=1)
    return np.array([quat_normalize(x) for x in q])


def sample_rotations(count: int, dimension: int, interval=(-math.pi / 4, math.pi / 4),
                     seed: int | None = None):
    """Rotation samples.

    2D returns ``count`` angles evenly spaced over ``interval`` with both
    endpoints included (a single sample is the interval midpoint).  3D returns
    a super-Fibonacci quaternion set; a seed applies one reproducible random
    global rotation to the whole set.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if dimension == 2:
        lo, hi = interval
        if count == 1:
            return [0.5 * (lo + hi)]
        return list(np.linspace(lo, hi, count))
    if dimension != 3:
        raise ValueError("dimension must be 2 or 3")
    qs = super_fibonacci(count)
    if seed is not None:
        g = Rotation.random(random_state=np.random.default_rng(seed))
        qs = np.array([_from_scipy(g * _to_scipy(q)) for q in qs])
    return list(qs)
