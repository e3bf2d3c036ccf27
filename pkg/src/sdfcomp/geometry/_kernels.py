# Compiled point/element primitives shared by the geometry and affinity code.
#
# Element geometry is passed as a dense array ``ev`` of shape (m, k, d):
# k = d vertices per element (segments in 2D, triangles in 3D).

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


@njit(cache=True, nogil=True)
def seg_dist2(px, py, ax, ay, bx, by):
    ex = bx - ax
    ey = by - ay
    l2 = ex * ex + ey * ey
    t = 0.0
    if l2 > 0.0:
        t = ((px - ax) * ex + (py - ay) * ey) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    dx = ax + t * ex - px
    dy = ay + t * ey - py
    return dx * dx + dy * dy


@njit(cache=True, nogil=True)
def tri_closest(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz):
    """Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5)."""
    abx = bx - ax
    aby = by - ay
    abz = bz - az
    acx = cx - ax
    acy = cy - ay
    acz = cz - az
    apx = px - ax
    apy = py - ay
    apz = pz - az
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        return ax, ay, az
    bpx = px - bx
    bpy = py - by
    bpz = pz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        return bx, by, bz
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return ax + v * abx, ay + v * aby, az + v * abz
    cpx = px - cx
    cpy = py - cy
    cpz = pz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        return cx, cy, cz
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return ax + w * acx, ay + w * acy, az + w * acz
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return bx + w * (cx - bx), by + w * (cy - by), bz + w * (cz - bz)
    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return (ax + abx * v + acx * w, ay + aby * v + acy * w, az + abz * v + acz * w)


@njit(cache=True, nogil=True)
def tri_dist2(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz):
    qx, qy, qz = tri_closest(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz)
    dx = qx - px
    dy = qy - py
    dz = qz - pz
    return dx * dx + dy * dy + dz * dz


@njit(cache=True, nogil=True)
def elem_dist2(ev, e, p):
    if ev.shape[2] == 2:
        return seg_dist2(p[0], p[1], ev[e, 0, 0], ev[e, 0, 1], ev[e, 1, 0], ev[e, 1, 1])
    return tri_dist2(
        p[0], p[1], p[2],
        ev[e, 0, 0], ev[e, 0, 1], ev[e, 0, 2],
        ev[e, 1, 0], ev[e, 1, 1], ev[e, 1, 2],
        ev[e, 2, 0], ev[e, 2, 1], ev[e, 2, 2],
    )


@njit(cache=True, nogil=True)
def elem_max_dist2(ev, e, p):
    # the farthest point of a segment/triangle from p is one of its vertices
    best = 0.0
    for k in range(ev.shape[1]):
        s = 0.0
        for a in range(ev.shape[2]):
            d = ev[e, k, a] - p[a]
            s += d * d
        if s > best:
            best = s
    return best


@njit(cache=True, nogil=True)
def tri_solid_angle(ax, ay, az, bx, by, bz, cx, cy, cz):
    """Signed solid angle of triangle (a, b, c), vertices relative to the viewer.

    Van Oosterom & Strackee (1983).  Positive when the viewer is on the side
    opposite to the right-hand normal, so outward meshes give +4pi inside.
    """
    la = math.sqrt(ax * ax + ay * ay + az * az)
    lb = math.sqrt(bx * bx + by * by + bz * bz)
    lc = math.sqrt(cx * cx + cy * cy + cz * cz)
    det = ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) + az * (bx * cy - by * cx)
    den = (la * lb * lc + (ax * bx + ay * by + az * bz) * lc
           + (ax * cx + ay * cy + az * cz) * lb + (bx * cx + by * cy + bz * cz) * la)
    return 2.0 * math.atan2(det, den)


@njit(cache=True, nogil=True)
def winding_number(ev, p):
    """Generalized winding number of the closed boundary around p.

    1 inside, 0 outside for an outward-oriented boundary.
    """
    m = ev.shape[0]
    total = 0.0
    if ev.shape[2] == 2:
        for e in range(m):
            ax = ev[e, 0, 0] - p[0]
            ay = ev[e, 0, 1] - p[1]
            bx = ev[e, 1, 0] - p[0]
            by = ev[e, 1, 1] - p[1]
            total += math.atan2(ax * by - ay * bx, ax * bx + ay * by)
        return total / TWO_PI
    for e in range(m):
        total += tri_solid_angle(
            ev[e, 0, 0] - p[0], ev[e, 0, 1] - p[1], ev[e, 0, 2] - p[2],
            ev[e, 1, 0] - p[0], ev[e, 1, 1] - p[1], ev[e, 1, 2] - p[2],
            ev[e, 2, 0] - p[0], ev[e, 2, 1] - p[1], ev[e, 2, 2] - p[2],
        )
    return total / FOUR_PI


# --- bounding volume hierarchy queries -------------------------------------

@njit(cache=True, nogil=True)
def _box_dist2(lo, hi, n, p):
    s = 0.0
    for a in range(p.shape[0]):
        v = p[a]
        if v < lo[n, a]:
            d = lo[n, a] - v
            s += d * d
        elif v > hi[n, a]:
            d = v - hi[n, a]
            s += d * d
    return s


@njit(cache=True, nogil=True)
def bvh_nearest(lo, hi, left, right, start, count, perm, ev, p):
    """Return (squared distance, element id) of the element nearest to p."""
    stack = np.empty(128, dtype=np.int64)
    top = 0
    stack[0] = 0
    top = 1
    best = np.inf
    best_e = -1
    while top > 0:
        top -= 1
        n = stack[top]
        if _box_dist2(lo, hi, n, p) >= best:
            continue
        if left[n] < 0:
            for k in range(start[n], start[n] + count[n]):
                e = perm[k]
                d2 = elem_dist2(ev, e, p)
                if d2 < best or (d2 == best and e < best_e):
                    best = d2
                    best_e = e
        else:
            l = left[n]
            r = right[n]
            dl = _box_dist2(lo, hi, l, p)
            dr = _box_dist2(lo, hi, r, p)
            # push the farther child first so the nearer one is expanded next
            if dl <= dr:
                stack[top] = r
                stack[top + 1] = l
            else:
                stack[top] = l
                stack[top + 1] = r
            top += 2
    return best, best_e


@njit(cache=True, nogil=True)
def bvh_range(lo, hi, left, right, start, count, perm, ev, p, radius, out):
    """Write ids of elements within ``radius`` of p into ``out``; return count.

    Output order is ascending element id.
    """
    r2 = radius * radius
    stack = np.empty(128, dtype=np.int64)
    stack[0] = 0
    top = 1
    nout = 0
    while top > 0:
        top -= 1
        n = stack[top]
        if _box_dist2(lo, hi, n, p) > r2:
            continue
        if left[n] < 0:
            for k in range(start[n], start[n] + count[n]):
                e = perm[k]
                if elem_dist2(ev, e, p) <= r2:
                    out[nout] = e
                    nout += 1
        else:
            stack[top] = left[n]
            stack[top + 1] = right[n]
            top += 2
    out[:nout].sort()
    return nout


@njit(cache=True, nogil=True)
def brute_nearest(ev, p):
    best = np.inf
    best_e = -1
    for e in range(ev.shape[0]):
        d2 = elem_dist2(ev, e, p)
        if d2 < best:
            best = d2
            best_e = e
    return best, best_e


@njit(cache=True, nogil=True)
def batch_nearest(lo, hi, left, right, start, count, perm, ev, pts):
    n = pts.shape[0]
    d2 = np.empty(n)
    eid = np.empty(n, dtype=np.int64)
    for i in range(n):
        d2[i], eid[i] = bvh_nearest(lo, hi, left, right, start, count, perm, ev, pts[i])
    return d2, eid


@njit(cache=True, nogil=True)
def batch_winding(ev, pts):
    n = pts.shape[0]
    w = np.empty(n)
    for i in range(n):
        w[i] = winding_number(ev, pts[i])
    return w
