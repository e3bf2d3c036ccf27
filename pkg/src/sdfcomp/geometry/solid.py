"""Oriented closed boundary representations (polygon loops and triangle meshes)."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .bvh import SpatialIndex


class GeometryError(ValueError):
    """Raised for boundaries that cannot be ingested."""


class OpenBoundaryError(GeometryError):
    pass


class OrientationError(GeometryError):
    pass


# relative to the bounding-box diagonal
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BoundarySolid:
    """Closed, consistently oriented boundary of a 2D or 3D solid.

    Attributes
    ----------
    vertices : ndarray, shape (n, d)
    elements : ndarray, shape (m, d)
        Vertex indices; segments ``(a, b)`` in 2D (material on the left),
        triangles ``(a, b, c)`` counter-clockwise seen from outside in 3D.
    normals : ndarray, shape (m, d)
        Outward unit normal per element.
    index : SpatialIndex
    h_max : float
        Upper bound on element diameter enforced at ingestion.
    """

    vertices: np.ndarray
    elements: np.ndarray
    normals: np.ndarray
    index: SpatialIndex
    h_max: float
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def ev(self) -> np.ndarray:
        """Element vertex coordinates, shape (m, d, d)."""
        return self.index.ev

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @property
    def diagonal(self) -> float:
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))

    @property
    def tol(self) -> float:
        """Boundary tolerance: points closer than this classify as on-boundary."""
        return BOUNDARY_TOL * self.diagonal

    @property
    def measures(self) -> np.ndarray:
        """Element lengths (2D) or areas (3D)."""
        ev = self.ev
        if self.dim == 2:
            return np.linalg.norm(ev[:, 1] - ev[:, 0], axis=1)
        return 0.5 * np.linalg.norm(np.cross(ev[:, 1] - ev[:, 0], ev[:, 2] - ev[:, 0]), axis=1)

    @property
    def volume(self) -> float:
        """Enclosed area (2D) or volume (3D), positive for outward orientation."""
        return _signed_volume(self.ev)

    @property
    def centroid(self) -> np.ndarray:
        if "centroid" not in self._cache:
            self._cache["centroid"] = _centroid(self.ev)
        return self._cache["centroid"]

    @classmethod
    def from_arrays(cls, vertices, elements, h_max: float | None = None,
                    name: str = "", leaf_size: int = 4) -> "BoundarySolid":
        """Validate, orient, refine and index a raw boundary.

        A globally inverted boundary is flipped; any other orientation defect
        raises :class:`OrientationError`.  Elements longer than ``h_max`` are
        subdivided.
        """
        V = np.array(vertices, dtype=np.float64)
        E = np.array(elements, dtype=np.int64)
        if V.ndim != 2 or V.shape[1] not in (2, 3):
            raise GeometryError(f"vertices must have shape (n, 2) or (n, 3), got {V.shape}")
        d = V.shape[1]
        if E.ndim != 2 or E.shape[1] != d or E.shape[0] == 0:
            raise GeometryError(f"elements must have shape (m, {d})")
        if E.min() < 0 or E.max() >= len(V):
            raise GeometryError("element index out of range")
        if h_max is not None and not h_max > 0:
            raise GeometryError("h_max must be positive")

        _check_closed(E, d)
        if _signed_volume(V[E]) < 0:
            E = E[:, ::-1].copy()
        if h_max is not None:
            V, E = _refine(V, E, h_max)
        ev = np.ascontiguousarray(V[E])
        normals = _element_normals(ev)
        index = SpatialIndex.build(ev, leaf_size=leaf_size)
        hm = float(h_max) if h_max is not None else float(_diameters(ev).max())
        solid = cls(V, E, normals, index, hm, name)
        _check_outward(solid)
        return solid

    def transformed(self, rotation, translation, name: str | None = None) -> "BoundarySolid":
        """Rigidly moved copy: x -> R x + t."""
        R = np.asarray(rotation, dtype=np.float64)
        t = np.asarray(translation, dtype=np.float64)
        V = self.vertices @ R.T + t
        ev = np.ascontiguousarray(V[self.elements])
        return BoundarySolid(V, self.elements.copy(), self.normals @ R.T,
                             SpatialIndex.build(ev, self.index.leaf_size), self.h_max,
                             self.name if name is None else name)


def _diameters(ev):
    k = ev.shape[1]
    best = np.zeros(ev.shape[0])
    for i in range(k):
        for j in range(i + 1, k):
            best = np.maximum(best, np.linalg.norm(ev[:, i] - ev[:, j], axis=1))
    return best


def _signed_volume(ev) -> float:
    if ev.shape[2] == 2:
        a, b = ev[:, 0], ev[:, 1]
        return float(0.5 * np.sum(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]))
    a, b, c = ev[:, 0], ev[:, 1], ev[:, 2]
    return float(np.sum(np.einsum("ij,ij->i", a, np.cross(b, c))) / 6.0)


def _centroid(ev) -> np.ndarray:
    if ev.shape[2] == 2:
        a, b = ev[:, 0], ev[:, 1]
        cr = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        area = 0.5 * cr.sum()
        return ((a + b) * cr[:, None]).sum(axis=0) / (6.0 * area)
    a, b, c = ev[:, 0], ev[:, 1], ev[:, 2]
    v = np.einsum("ij,ij->i", a, np.cross(b, c)) / 6.0
    return ((a + b + c) * v[:, None]).sum(axis=0) / (4.0 * v.sum())


def _element_normals(ev) -> np.ndarray:
    if ev.shape[2] == 2:
        t = ev[:, 1] - ev[:, 0]
        n = np.stack([t[:, 1], -t[:, 0]], axis=1)
    else:
        n = np.cross(ev[:, 1] - ev[:, 0], ev[:, 2] - ev[:, 0])
    ln = np.linalg.norm(n, axis=1)
    if np.any(ln == 0):
        raise GeometryError("degenerate (zero-measure) element")
    return n / ln[:, None]


def _check_closed(E, d):
    if d == 2:
        outgoing = Counter(E[:, 0].tolist())
        incoming = Counter(E[:, 1].tolist())
        used = set(outgoing) | set(incoming)
        for v in used:
            deg = outgoing.get(v, 0) + incoming.get(v, 0)
            if deg != 2:
                raise OpenBoundaryError(f"vertex {v} has {deg} incident segments")
        for v in used:
            if outgoing.get(v, 0) != 1:
                raise OrientationError(f"inconsistent loop winding at vertex {v}")
        return
    directed = Counter()
    for a, b, c in E.tolist():
        directed[(a, b)] += 1
        directed[(b, c)] += 1
        directed[(c, a)] += 1
    undirected = Counter()
    for (a, b), k in directed.items():
        undirected[(min(a, b), max(a, b))] += k
    for edge, k in undirected.items():
        if k != 2:
            raise OpenBoundaryError(f"edge {edge} has {k} incident triangles")
    for (a, b), k in directed.items():
        if k != 1:
            raise OrientationError(f"edge {(a, b)} traversed twice in the same direction")


def _refine(V, E, h_max):
    d = V.shape[1]
    if d == 2:
        verts = [v for v in V]
        segs = []
        for a, b in E.tolist():
            L = float(np.linalg.norm(V[b] - V[a]))
            n = max(1, math.ceil(L / h_max - 1e-9))
            prev = a
            for i in range(1, n):
                verts.append(V[a] + (V[b] - V[a]) * (i / n))
                cur = len(verts) - 1
                segs.append((prev, cur))
                prev = cur
            segs.append((prev, b))
        return np.array(verts), np.array(segs, dtype=np.int64)
    # uniform 1-to-4 midpoint splits keep the mesh conforming
    while _diameters(V[E]).max() > h_max * (1 + 1e-9):
        verts = list(V)
        mids = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in mids:
                verts.append(0.5 * (V[a] + V[b]))
                mids[key] = len(verts) - 1
            return mids[key]

        tris = []
        for a, b, c in E.tolist():
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        V, E = np.array(verts), np.array(tris, dtype=np.int64)
    return V, E


def _check_outward(solid: BoundarySolid) -> None:
    ev = solid.ev
    sizes = _diameters(ev)
    delta = 1e-3 * float(sizes.min())
    probes = ev.mean(axis=1) + delta * solid.normals
    w = _kernels.batch_winding(ev, probes)
    bad = np.flatnonzero(w >= 0.5)
    if bad.size:
        raise OrientationError(
            f"{bad.size} element normals point into the solid; "
            "orientation is not repairable by a global flip")


def discretize_arc(center, radius: float, span, max_chord: float) -> np.ndarray:
    """Polyline vertices on a circular arc with chords no longer than ``max_chord``.

    ``span`` is ``(start_angle, end_angle)`` in radians, traversed in that
    direction.  Both endpoints are included; a full circle repeats its first
    vertex at the end and uses at least three chords.
    """
    a0, a1 = float(span[0]), float(span[1])
    if not radius > 0 or not max_chord > 0:
        raise ValueError("radius and max_chord must be positive")
    sweep = a1 - a0
    if abs(sweep) < 1e-15:
        raise ValueError("degenerate arc span")
    ratio = max_chord / (2.0 * radius)
    step = math.pi if ratio >= 1.0 else 2.0 * math.asin(ratio)
    n = max(1, math.ceil(abs(sweep) / step - 1e-12))
    if abs(abs(sweep) - 2 * math.pi) < 1e-12:
        n = max(n, 3)
    ang = a0 + sweep * np.arange(n + 1) / n
    c = np.asarray(center, dtype=np.float64)
    pts = c + radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return pts


def polygon(loops, h_max: float | None = None, name: str = "") -> BoundarySolid:
    """Build a 2D solid from vertex loops (outer loops CCW, holes CW).

    A loop that repeats its first vertex at the end is accepted.
    """
    verts, segs = [], []
    for loop in loops:
        pts = np.asarray(loop, dtype=np.float64)
        if len(pts) > 1 and np.allclose(pts[0], pts[-1], rtol=0, atol=1e-14):
            pts = pts[:-1]
        if len(pts) < 3:
            raise OpenBoundaryError("a loop needs at least three vertices")
        base = len(verts)
        verts.extend(pts)
        k = len(pts)
        segs.extend((base + i, base + (i + 1) % k) for i in range(k))
    return BoundarySolid.from_arrays(np.array(verts), np.array(segs), h_max=h_max, name=name)


def transform_points(points, rotation, translation):
    return np.asarray(points) @ np.asarray(rotation).T + np.asarray(translation)
