# Compiled boundary quadrature for the skeletal density affinity.
#
# Every contribution is written as K(r) * dgamma, where r = eta / |xi| and
# dgamma is the signed plane angle (2D) or solid angle (3D) under which the
# boundary piece is seen.  K(r) = phi(pmc + i r) * r^2.

import math

import numpy as np
from numba import njit

from ..geometry._kernels import (
    bvh_nearest,
    bvh_range,
    tri_dist2,
    tri_solid_angle,
    winding_number,
)

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Gauss-Legendre, 3 points on [0, 1]
_GL_X = np.array([0.5 - 0.5 * math.sqrt(0.6), 0.5, 0.5 + 0.5 * math.sqrt(0.6)])
_GL_W = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])

# Dunavant degree-5 rule, 7 points (barycentric), weights sum to 1
_A1, _B1 = 0.059715871789770, 0.470142064105115
_A2, _B2 = 0.797426985353087, 0.101286507323456
_TRI_L = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
    [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
])
_TRI_W = np.array([0.225, 0.132394152788506, 0.132394152788506, 0.132394152788506,
                   0.125939180544827, 0.125939180544827, 0.125939180544827])


@njit(cache=True, nogil=True)
def kernel_r2(s, r, sigma, lam):
    """phi(s + i r) * r^2 with phi the thickness-sigma kernel and weight lam."""
    z = complex(s, r)
    x = (r - 1.0) / sigma
    g = INV_SQRT_2PI / sigma * math.exp(-0.5 * x * x)
    return lam * INV_SQRT_2PI * g * r * r / (z * z)


@njit(cache=True, nogil=True)
def _segment_integral(p, a, b, n, d, s, lam, sigma, rmax, dgamma):
    # angle parametrisation: beta measured from the perpendicular foot
    sgn_h = (p[0] - a[0]) * n[0] + (p[1] - a[1]) * n[1]
    h = abs(sgn_h)
    if h == 0.0:
        return 0.0j
    ux = b[0] - a[0]
    uy = b[1] - a[1]
    L = math.sqrt(ux * ux + uy * uy)
    ux /= L
    uy /= L
    ta = (a[0] - p[0]) * ux + (a[1] - p[1]) * uy
    tb = (b[0] - p[0]) * ux + (b[1] - p[1]) * uy
    lo = math.atan2(min(ta, tb), h)
    hi = math.atan2(max(ta, tb), h)
    if rmax < np.inf:
        c = h / (rmax * d)
        if c >= 1.0:
            return 0.0j
        bmax = math.acos(c)
        lo = max(lo, -bmax)
        hi = min(hi, bmax)
        if hi <= lo:
            return 0.0j
    span = hi - lo
    npc = max(1, int(math.ceil(span / dgamma)))
    w = span / npc
    acc = 0.0j
    for k in range(npc):
        b0 = lo + k * w
        for j in range(3):
            beta = b0 + _GL_X[j] * w
            r = h / (math.cos(beta) * d)
            acc += _GL_W[j] * kernel_r2(s, r, sigma, lam)
    acc *= w
    return acc if sgn_h > 0.0 else -acc


@njit(cache=True, nogil=True)
def _triangle_integral(p, tri, n, d, s, lam, sigma, rmax, dgamma, max_depth, flat=False):
    # flat=True integrates the bare angle element (kernel replaced by 1)
    stack = np.empty((4 * max_depth + 8, 3, 3))
    depth = np.empty(4 * max_depth + 8, dtype=np.int64)
    stack[0] = tri
    depth[0] = 0
    top = 1
    acc = 0.0j
    rlim = rmax * d
    px, py, pz = p[0], p[1], p[2]
    while top > 0:
        top -= 1
        t = stack[top].copy()
        dep = depth[top]
        ax, ay, az = t[0, 0], t[0, 1], t[0, 2]
        bx, by, bz = t[1, 0], t[1, 1], t[1, 2]
        cx, cy, cz = t[2, 0], t[2, 1], t[2, 2]
        dmin = math.sqrt(tri_dist2(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz))
        if dmin > rlim:
            continue
        omega = tri_solid_angle(ax - px, ay - py, az - pz, bx - px, by - py, bz - pz,
                                cx - px, cy - py, cz - pz)
        e1 = math.sqrt((bx - ax) ** 2 + (by - ay) ** 2 + (bz - az) ** 2)
        e2 = math.sqrt((cx - bx) ** 2 + (cy - by) ** 2 + (cz - bz) ** 2)
        e3 = math.sqrt((ax - cx) ** 2 + (ay - cy) ** 2 + (az - cz) ** 2)
        diam = max(e1, max(e2, e3))
        if dep < max_depth and (abs(omega) > dgamma or diam > dmin):
            mab = 0.5 * (t[0] + t[1])
            mbc = 0.5 * (t[1] + t[2])
            mca = 0.5 * (t[2] + t[0])
            stack[top, 0] = t[0]
            stack[top, 1] = mab
            stack[top, 2] = mca
            stack[top + 1, 0] = mab
            stack[top + 1, 1] = t[1]
            stack[top + 1, 2] = mbc
            stack[top + 2, 0] = mca
            stack[top + 2, 1] = mbc
            stack[top + 2, 2] = t[2]
            stack[top + 3, 0] = mab
            stack[top + 3, 1] = mbc
            stack[top + 3, 2] = mca
            for k in range(4):
                depth[top + k] = dep + 1
            top += 4
            continue
        # leaf: 7-point rule on cos(theta) dA / eta^2
        ex = (by - ay) * (cz - az) - (bz - az) * (cy - ay)
        ey = (bz - az) * (cx - ax) - (bx - ax) * (cz - az)
        ez = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        area = 0.5 * math.sqrt(ex * ex + ey * ey + ez * ez)
        leaf = 0.0j
        for k in range(7):
            qx = _TRI_L[k, 0] * ax + _TRI_L[k, 1] * bx + _TRI_L[k, 2] * cx
            qy = _TRI_L[k, 0] * ay + _TRI_L[k, 1] * by + _TRI_L[k, 2] * cy
            qz = _TRI_L[k, 0] * az + _TRI_L[k, 1] * bz + _TRI_L[k, 2] * cz
            vx = px - qx
            vy = py - qy
            vz = pz - qz
            eta = math.sqrt(vx * vx + vy * vy + vz * vz)
            if eta > rlim or eta == 0.0:
                continue
            cos_t = (vx * n[0] + vy * n[1] + vz * n[2]) / eta
            kv = 1.0 + 0.0j if flat else kernel_r2(s, eta / d, sigma, lam)
            leaf += _TRI_W[k] * kv * cos_t / (eta * eta)
        acc += leaf * area
    return acc


@njit(cache=True, nogil=True)
def affinity_points(points, ev, normals, lo, hi, left, right, start, count, perm,
                    tol_b, sigma, lam1, lam2, eps, dgamma, max_depth):
    """Affinity at each query point; eps <= 0 integrates the whole boundary."""
    npts = points.shape[0]
    m = ev.shape[0]
    dim = ev.shape[2]
    out = np.zeros(npts, dtype=np.complex128)
    cand = np.empty(m, dtype=np.int64)
    for i in range(npts):
        p = points[i]
        d2, _ = bvh_nearest(lo, hi, left, right, start, count, perm, ev, p)
        d = math.sqrt(d2)
        if d < tol_b:
            continue
        s = -1.0 if winding_number(ev, p) >= 0.5 else 1.0
        lam = lam1 if s > 0 else -lam2
        if eps > 0.0:
            rmax = 1.0 + eps
            nc = bvh_range(lo, hi, left, right, start, count, perm, ev, p,
                           rmax * d * (1.0 + 1e-12), cand)
        else:
            rmax = np.inf
            nc = m
            for e in range(m):
                cand[e] = e
        acc = 0.0j
        for k in range(nc):
            e = cand[k]
            if dim == 2:
                acc += _segment_integral(p, ev[e, 0], ev[e, 1], normals[e], d, s, lam,
                                         sigma, rmax, dgamma)
            else:
                acc += _triangle_integral(p, ev[e], normals[e], d, s, lam, sigma, rmax,
                                          dgamma, max_depth)
        out[i] = acc
    return out


@njit(cache=True, nogil=True)
def spatial_angle_points(points, ev, normals, lo, hi, left, right, start, count, perm,
                         tol_b, eps, dgamma, max_depth):
    """Signed spatial angle of the eps-contact region (radians / steradians)."""
    npts = points.shape[0]
    m = ev.shape[0]
    dim = ev.shape[2]
    out = np.zeros(npts)
    cand = np.empty(m, dtype=np.int64)
    for i in range(npts):
        p = points[i]
        d2, _ = bvh_nearest(lo, hi, left, right, start, count, perm, ev, p)
        d = math.sqrt(d2)
        if d < tol_b:
            continue
        rmax = 1.0 + eps
        nc = bvh_range(lo, hi, left, right, start, count, perm, ev, p,
                       rmax * d * (1.0 + 1e-12), cand)
        acc = 0.0
        for k in range(nc):
            e = cand[k]
            if dim == 2:
                acc += _segment_angle(p, ev[e, 0], ev[e, 1], normals[e], d, rmax)
            else:
                acc += _triangle_integral(p, ev[e], normals[e], d, 1.0, 1.0, 1.0, rmax,
                                          dgamma, max_depth, True).real
        out[i] = acc
    return out


@njit(cache=True, nogil=True)
def _segment_angle(p, a, b, n, d, rmax):
    sgn_h = (p[0] - a[0]) * n[0] + (p[1] - a[1]) * n[1]
    h = abs(sgn_h)
    if h == 0.0:
        return 0.0
    ux = b[0] - a[0]
    uy = b[1] - a[1]
    L = math.sqrt(ux * ux + uy * uy)
    ta = ((a[0] - p[0]) * ux + (a[1] - p[1]) * uy) / L
    tb = ((b[0] - p[0]) * ux + (b[1] - p[1]) * uy) / L
    lo = math.atan2(min(ta, tb), h)
    hi = math.atan2(max(ta, tb), h)
    c = h / (rmax * d)
    if c >= 1.0:
        return 0.0
    bmax = math.acos(c)
    lo = max(lo, -bmax)
    hi = min(hi, bmax)
    if hi <= lo:
        return 0.0
    return (hi - lo) if sgn_h > 0.0 else -(hi - lo)
