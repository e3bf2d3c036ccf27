"""Axis-aligned bounding volume hierarchy over boundary elements."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels


@dataclass(frozen=True, eq=False)
class SpatialIndex:
    """Flattened AABB tree.

    Node ``n`` covers ``perm[start[n]:start[n] + count[n]]``; internal nodes
    have ``left[n] >= 0`` and ``right[n] >= 0``.  The element coordinates
    ``ev`` (shape ``(m, k, d)``) are held alongside so queries are
    self-contained.
    """

    lo: np.ndarray
    hi: np.ndarray
    left: np.ndarray
    right: np.ndarray
    start: np.ndarray
    count: np.ndarray
    perm: np.ndarray
    ev: np.ndarray
    leaf_size: int

    @classmethod
    def build(cls, ev: np.ndarray, leaf_size: int = 4) -> "SpatialIndex":
        ev = np.ascontiguousarray(ev, dtype=np.float64)
        m = ev.shape[0]
        elo = ev.min(axis=1)
        ehi = ev.max(axis=1)
        cen = 0.5 * (elo + ehi)
        perm = np.arange(m, dtype=np.int64)

        lo, hi, left, right, start, count = [], [], [], [], [], []

        def new_node(s, e):
            idx = perm[s:e]
            lo.append(elo[idx].min(axis=0))
            hi.append(ehi[idx].max(axis=0))
            left.append(-1)
            right.append(-1)
            start.append(s)
            count.append(e - s)
            return len(lo) - 1

        stack = [(new_node(0, m), 0, m)]
        while stack:
            node, s, e = stack.pop()
            if e - s <= leaf_size:
                continue
            idx = perm[s:e]
            c = cen[idx]
            axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
            mid = (e - s) // 2
            order = np.argsort(c[:, axis], kind="stable")
            perm[s:e] = idx[order]
            l_node = new_node(s, s + mid)
            r_node = new_node(s + mid, e)
            left[node] = l_node
            right[node] = r_node
            stack.append((r_node, s + mid, e))
            stack.append((l_node, s, s + mid))

        return cls(
            lo=np.array(lo), hi=np.array(hi),
            left=np.array(left, dtype=np.int64), right=np.array(right, dtype=np.int64),
            start=np.array(start, dtype=np.int64), count=np.array(count, dtype=np.int64),
            perm=perm, ev=ev, leaf_size=leaf_size,
        )

    @property
    def arrays(self):
        return (self.lo, self.hi, self.left, self.right, self.start, self.count, self.perm)

    def nearest(self, p) -> tuple[float, int]:
        """Distance to, and id of, the nearest element."""
        p = np.asarray(p, dtype=np.float64)
        d2, e = _kernels.bvh_nearest(*self.arrays, self.ev, p)
        return float(np.sqrt(d2)), int(e)

    def nearest_many(self, pts) -> tuple[np.ndarray, np.ndarray]:
        pts = np.ascontiguousarray(pts, dtype=np.float64)
        d2, e = _kernels.batch_nearest(*self.arrays, self.ev, pts)
        return np.sqrt(d2), e

    def within(self, p, radius: float) -> np.ndarray:
        """Ids (ascending) of all elements whose distance to p is <= radius."""
        p = np.asarray(p, dtype=np.float64)
        out = np.empty(self.ev.shape[0], dtype=np.int64)
        n = _kernels.bvh_range(*self.arrays, self.ev, p, float(radius), out)
        return out[:n].copy()
