"""Built-in shape generators: primitives and the peg/hole example pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .solid import BoundarySolid, discretize_arc, polygon

# chord bound for circular arcs in the 2D examples
ARC_CHORD = 0.1


def circle(radius: float = 1.0, center=(0.0, 0.0), max_chord: float = 0.1,
           h_max: float | None = None) -> BoundarySolid:
    pts = discretize_arc(center, radius, (0.0, 2 * math.pi), max_chord)
    return polygon([pts], h_max=h_max, name=f"circle_r{radius:g}")


def rectangle(width: float, height: float, center=(0.0, 0.0),
              h_max: float | None = None) -> BoundarySolid:
    cx, cy = center
    w, h = width / 2, height / 2
    pts = [(cx - w, cy - h), (cx + w, cy - h), (cx + w, cy + h), (cx - w, cy + h)]
    return polygon([pts], h_max=h_max, name=f"rect_{width:g}x{height:g}")


def icosphere(radius: float = 1.0, level: int = 2, center=(0.0, 0.0, 0.0)) -> BoundarySolid:
    """Subdivided icosahedron with all vertices on the sphere."""
    t = (1 + math.sqrt(5)) / 2
    V = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
         (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
         (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    F = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
         (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
         (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
         (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    V = [np.array(v, dtype=np.float64) / np.linalg.norm(v) for v in V]
    for _ in range(level):
        mids = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in mids:
                m = V[a] + V[b]
                V.append(m / np.linalg.norm(m))
                mids[key] = len(V) - 1
            return mids[key]

        F2 = []
        for a, b, c in F:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            F2 += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        F = F2
    verts = np.array(V) * radius + np.asarray(center, dtype=np.float64)
    return BoundarySolid.from_arrays(verts, np.array(F), name=f"icosphere_r{radius:g}_l{level}")


def voxel_solid(occupancy, cell: float = 1.0, origin=(0.0, 0.0, 0.0),
                h_max: float | None = None, name: str = "voxels") -> BoundarySolid:
    """Boundary of a union of axis-aligned cubes.

    ``occupancy[i, j, k]`` marks the cube ``origin + cell * [i, i+1] x [j, j+1] x [k, k+1]``.
    Configurations where cubes touch only along an edge or corner are not
    manifold and are rejected at ingestion.
    """
    occ = np.asarray(occupancy, dtype=bool)
    padded = np.pad(occ, 1)
    verts: dict[tuple[int, int, int], int] = {}
    tris = []

    def vid(c):
        if c not in verts:
            verts[c] = len(verts)
        return verts[c]

    for axis in range(3):
        for sign in (1, -1):
            step = [0, 0, 0]
            step[axis] = sign
            nb = np.roll(padded, -sign, axis=axis)[1:-1, 1:-1, 1:-1]
            for i, j, k in zip(*np.nonzero(occ & ~nb)):
                base = [i, j, k]
                if sign > 0:
                    base[axis] += 1
                u, v = [a for a in range(3) if a != axis]
                corners = []
                for du, dv in ((0, 0), (1, 0), (1, 1), (0, 1)):
                    c = list(base)
                    c[u] += du
                    c[v] += dv
                    corners.append(tuple(int(x) for x in c))
                # order the quad so its right-hand normal is +sign along axis
                e1 = np.subtract(corners[1], corners[0])
                e2 = np.subtract(corners[3], corners[0])
                if np.cross(e1, e2)[axis] * sign < 0:
                    corners = corners[::-1]
                a, b, c, d = (vid(x) for x in corners)
                tris += [(a, b, c), (a, c, d)]
    V = np.zeros((len(verts), 3))
    for c, i in verts.items():
        V[i] = c
    V = V * cell + np.asarray(origin, dtype=np.float64)
    return BoundarySolid.from_arrays(V, np.array(tris), h_max=h_max, name=name)


def centered(S: BoundarySolid) -> tuple[BoundarySolid, np.ndarray]:
    """Translate S so its centroid sits at the origin; return (shape, old centroid)."""
    c = S.centroid.copy()
    return S.transformed(np.eye(S.dim), -c, name=S.name), c


@dataclass(frozen=True)
class ExamplePair:
    """A fixed part, a moving part (centroid at its local origin) and the seated pose.

    ``reference`` is ``(x, y, theta)`` in 2D or ``(tx, ty, tz, qw, qx, qy, qz)`` in 3D:
    the world position of the moving part's centroid and its orientation at the fit.
    """

    name: str
    fixed: BoundarySolid
    moving: BoundarySolid
    reference: tuple


def _arc(center, r, a0, a1, chord=ARC_CHORD):
    return [tuple(p) for p in discretize_arc(center, r, (a0, a1), chord)]


# --- the three 2D peg/hole examples ---------------------------------------
#
# Every fixed part is a 4 x 3 block (x in [-2, 2], y in [-3, 0]) with a socket
# cut into its top face.  Each peg fills its socket exactly, flush with the top.

def _block_with_socket(socket):
    """CCW loop: block corners then the socket profile from right rim to left rim."""
    return [(-2.0, -3.0), (2.0, -3.0), (2.0, 0.0)] + socket + [(-2.0, 0.0)]


def example_pair(k: int, h_max: float | None = None) -> ExamplePair:
    """Example pairs 1-3: deep narrow slot, inverted-T key, wide U slot.

    The sockets are chosen so that no peg nests inside another's socket.  The
    slot peg has one chamfered top corner so its fit has no 180 degree twin.
    """
    if k == 1:
        w, d, c = 0.3, 2.2, 0.15
        hole = _block_with_socket([(w, 0.0), (w, -d), (-w, -d), (-w, 0.0)])
        peg = [(-w, -d), (w, -d), (w, -c), (w - c, 0.0), (-w, 0.0)]
    elif k == 2:
        n, a, f, b = 0.3, 0.9, 0.8, 0.65  # neck half-width and depth, foot half-width and height
        hole = _block_with_socket([(n, 0.0), (n, -a), (f, -a), (f, -a - b),
                                   (-f, -a - b), (-f, -a), (-n, -a), (-n, 0.0)])
        peg = [(-f, -a - b), (f, -a - b), (f, -a), (n, -a), (n, 0.0), (-n, 0.0),
               (-n, -a), (-f, -a)]
    elif k == 3:
        r, d = 0.9, 1.3
        arc = _arc((0.0, -d + r), r, 0.0, -math.pi)
        hole = _block_with_socket([(r, 0.0)] + arc + [(-r, 0.0)])
        peg = arc[::-1] + [(r, 0.0), (-r, 0.0)]
    else:
        raise ValueError(f"no example pair {k}")
    fixed = polygon([_dedupe(hole)], h_max=h_max, name=f"example{k}_fixed")
    raw_peg = polygon([_dedupe(peg)], h_max=h_max, name=f"example{k}_peg")
    moving, c = centered(raw_peg)
    return ExamplePair(f"example{k}", fixed, moving, (float(c[0]), float(c[1]), 0.0))


def _dedupe(pts):
    out = []
    for p in pts:
        if not out or math.dist(out[-1], p) > 1e-12:
            out.append(tuple(p))
    if math.dist(out[0], out[-1]) <= 1e-12:
        out.pop()
    return out


def example_pair_3d(cell: float = 0.25, h_max: float | None = None) -> ExamplePair:
    """Mechanical parts: a plate with a stepped pocket and a matching stepped plug."""
    n = int(round(1.0 / cell))
    # plate 3 x 3 x 1.5 units (x, y in [-1.5, 1.5], z in [-1.5, 0])
    nx = ny = 3 * n
    nz = int(round(1.5 / cell))
    plate = np.ones((nx, ny, nz), dtype=bool)
    # pocket: 1.0 x 0.5 wide through the top 1.0, plus a 0.5 x 0.5 keyway reaching deeper
    def box(arr, x0, x1, y0, y1, z0, z1, value):
        ix = slice(int(round((x0 + 1.5) / cell)), int(round((x1 + 1.5) / cell)))
        iy = slice(int(round((y0 + 1.5) / cell)), int(round((y1 + 1.5) / cell)))
        iz = slice(int(round((z0 + 1.5) / cell)), int(round((z1 + 1.5) / cell)))
        arr[ix, iy, iz] = value

    box(plate, -0.5, 0.5, -0.25, 0.5, -0.75, 0.0, False)
    box(plate, -0.5, 0.0, -0.25, 0.25, -1.0, -0.75, False)
    fixed = voxel_solid(plate, cell, (-1.5, -1.5, -1.5), h_max=h_max, name="plate3d")

    # plug fills the pocket and rises 0.75 above the plate
    m = int(round(1.0 / cell))
    plug = np.zeros((m, m, int(round(1.75 / cell))), dtype=bool)
    # local frame of the plug voxel grid: x in [-0.5, 0.5], y in [-0.25, 0.75], z in [-1, 0.75]
    def pbox(x0, x1, y0, y1, z0, z1):
        ix = slice(int(round((x0 + 0.5) / cell)), int(round((x1 + 0.5) / cell)))
        iy = slice(int(round((y0 + 0.25) / cell)), int(round((y1 + 0.25) / cell)))
        iz = slice(int(round((z0 + 1.0) / cell)), int(round((z1 + 1.0) / cell)))
        plug[ix, iy, iz] = True

    pbox(-0.5, 0.5, -0.25, 0.5, -0.75, 0.75)
    pbox(-0.5, 0.0, -0.25, 0.25, -1.0, -0.75)
    raw = voxel_solid(plug, cell, (-0.5, -0.25, -1.0), h_max=h_max, name="plug3d")
    moving, c = centered(raw)
    ref = (float(c[0]), float(c[1]), float(c[2]), 1.0, 0.0, 0.0, 0.0)
    return ExamplePair("mechanical3d", fixed, moving, ref)
