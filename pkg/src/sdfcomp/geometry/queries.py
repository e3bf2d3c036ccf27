"""Point membership, signed distance and the complex projection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .solid import BoundarySolid

# slack on the contact-ball radius so equidistant elements are not lost to rounding
_CONTACT_RTOL = 1e-12


@dataclass(frozen=True)
class DistancePair:
    xi: float
    eta: float
    mu: float | None = None


def pmc(p, S: BoundarySolid) -> int:
    """+1 exterior, -1 interior, 0 within the boundary tolerance."""
    p = np.asarray(p, dtype=np.float64)
    d, _ = S.index.nearest(p)
    if d < S.tol:
        return 0
    w = _kernels.winding_number(S.ev, p)
    return -1 if w >= 0.5 else 1


def pmc_many(points, S: BoundarySolid) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=np.float64)
    d, _ = S.index.nearest_many(pts)
    w = _kernels.batch_winding(S.ev, pts)
    out = np.where(w >= 0.5, -1, 1)
    out[d < S.tol] = 0
    return out


def signed_distance(p, S: BoundarySolid, with_mu: bool = False) -> DistancePair:
    """Signed minimum distance ``xi`` (exact for the discretized boundary).

    ``eta`` is the unsigned distance; ``mu`` (the maximum distance to the
    boundary) is filled only on request.
    """
    p = np.asarray(p, dtype=np.float64)
    d, _ = S.index.nearest(p)
    if d < S.tol:
        s = 0
    else:
        s = -1 if _kernels.winding_number(S.ev, p) >= 0.5 else 1
    mu = max_distance(p, S) if with_mu else None
    return DistancePair(xi=s * d, eta=d, mu=mu)


def signed_distance_many(points, S: BoundarySolid) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=np.float64)
    d, _ = S.index.nearest_many(pts)
    return pmc_many(pts, S) * d


def max_distance(p, S: BoundarySolid) -> float:
    p = np.asarray(p, dtype=np.float64)
    return float(np.sqrt(((S.vertices - p) ** 2).sum(axis=1).max()))


def gaze_cos(p, q, n) -> float:
    """Cosine of the angle between (p - q) and the outward normal n at q."""
    v = np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64)
    L = float(np.linalg.norm(v))
    if L == 0.0:
        raise ValueError("gaze direction undefined for p == q")
    return float(np.dot(v, n) / L)


def zeta(p, q, S: BoundarySolid) -> complex:
    """Complex projection xi(p, S) + i * |p - q| (positive imaginary convention)."""
    xi = signed_distance(p, S).xi
    eta = float(np.linalg.norm(np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64)))
    return complex(xi, eta)


def contact_region(p, S: BoundarySolid, eps: float) -> np.ndarray:
    """Ids of elements meeting the ball of radius (1 + eps)|xi| about p."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    xi = signed_distance(p, S).xi
    if xi == 0:
        return np.empty(0, dtype=np.int64)
    radius = (1.0 + eps) * abs(xi) * (1.0 + _CONTACT_RTOL)
    return S.index.within(np.asarray(p, dtype=np.float64), radius)
