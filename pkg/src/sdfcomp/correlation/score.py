"""Direct evaluation of the complex cross-correlation score at one pose."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..affinity.field import AffinityField
from .pose import Pose

SPACING_RTOL = 1e-9


class IncompatibleFieldsError(ValueError):
    pass


@njit(cache=True, nogil=True)
def _interp2(data, ox, oy, h, x, y):
    nx, ny = data.shape
    fx = (x - ox) / h
    fy = (y - oy) / h
    i = int(math.floor(fx))
    j = int(math.floor(fy))
    if i < -1 or j < -1 or i >= nx or j >= ny:
        return 0.0j
    tx = fx - i
    ty = fy - j
    acc = 0.0j
    for a in range(2):
        ii = i + a
        if ii < 0 or ii >= nx:
            continue
        wx = tx if a else 1.0 - tx
        for b in range(2):
            jj = j + b
            if jj < 0 or jj >= ny:
                continue
            wy = ty if b else 1.0 - ty
            acc += wx * wy * data[ii, jj]
    return acc


@njit(cache=True, nogil=True)
def _interp3(data, ox, oy, oz, h, x, y, z):
    nx, ny, nz = data.shape
    fx = (x - ox) / h
    fy = (y - oy) / h
    fz = (z - oz) / h
    i = int(math.floor(fx))
    j = int(math.floor(fy))
    k = int(math.floor(fz))
    if i < -1 or j < -1 or k < -1 or i >= nx or j >= ny or k >= nz:
        return 0.0j
    tx = fx - i
    ty = fy - j
    tz = fz - k
    acc = 0.0j
    for a in range(2):
        ii = i + a
        if ii < 0 or ii >= nx:
            continue
        wx = tx if a else 1.0 - tx
        for b in range(2):
            jj = j + b
            if jj < 0 or jj >= ny:
                continue
            wy = ty if b else 1.0 - ty
            for c in range(2):
                kk = k + c
                if kk < 0 or kk >= nz:
                    continue
                wz = tz if c else 1.0 - tz
                acc += wx * wy * wz * data[ii, jj, kk]
    return acc


@njit(cache=True, nogil=True)
def interp_points(data, origin, h, pts):
    """Multilinear interpolation of a complex grid at points; zero outside."""
    n = pts.shape[0]
    out = np.empty(n, dtype=np.complex128)
    if data.ndim == 2:
        for i in range(n):
            out[i] = _interp2(data, origin[0], origin[1], h, pts[i, 0], pts[i, 1])
    else:
        for i in range(n):
            out[i] = _interp3(data, origin[0], origin[1], origin[2], h,
                              pts[i, 0], pts[i, 1], pts[i, 2])
    return out


@njit(cache=True, nogil=True)
def _score2(d1, o1, d2, o2, h, R, t, lo, hi):
    # sum over the block of f1 nodes lo..hi of rho1(p) * rho2(R^T (p - t))
    acc = 0.0j
    for i in range(lo[0], hi[0] + 1):
        px = o1[0] + h * i - t[0]
        for j in range(lo[1], hi[1] + 1):
            v1 = d1[i, j]
            if v1 == 0:
                continue
            py = o1[1] + h * j - t[1]
            x = R[0, 0] * px + R[1, 0] * py
            y = R[0, 1] * px + R[1, 1] * py
            acc += v1 * _interp2(d2, o2[0], o2[1], h, x, y)
    return acc


@njit(cache=True, nogil=True)
def _score3(d1, o1, d2, o2, h, R, t, lo, hi):
    acc = 0.0j
    for i in range(lo[0], hi[0] + 1):
        px = o1[0] + h * i - t[0]
        for j in range(lo[1], hi[1] + 1):
            py = o1[1] + h * j - t[1]
            for k in range(lo[2], hi[2] + 1):
                v1 = d1[i, j, k]
                if v1 == 0:
                    continue
                pz = o1[2] + h * k - t[2]
                x = R[0, 0] * px + R[1, 0] * py + R[2, 0] * pz
                y = R[0, 1] * px + R[1, 1] * py + R[2, 1] * pz
                z = R[0, 2] * px + R[1, 2] * py + R[2, 2] * pz
                acc += v1 * _interp3(d2, o2[0], o2[1], o2[2], h, x, y, z)
    return acc


def check_compatible(f1: AffinityField, f2: AffinityField) -> None:
    if f1.dim != f2.dim:
        raise IncompatibleFieldsError("fields have different dimensions")
    if abs(f1.spacing - f2.spacing) > SPACING_RTOL * f1.spacing:
        raise IncompatibleFieldsError(
            f"spacings differ ({f1.spacing} vs {f2.spacing}); resample one field first")


def _overlap_block(f1: AffinityField, f2: AffinityField, R, t):
    # index range of f1 nodes that can see the moved support box of f2
    g2 = f2.grid
    corners = np.array(np.meshgrid(*[[g2.origin[a], g2.upper[a]] for a in range(g2.dim)],
                                   indexing="ij")).reshape(g2.dim, -1).T
    moved = corners @ R.T + t
    h = f1.spacing
    lo = np.floor((moved.min(axis=0) - f1.origin) / h).astype(np.int64)
    hi = np.ceil((moved.max(axis=0) - f1.origin) / h).astype(np.int64)
    lo = np.maximum(lo, 0)
    hi = np.minimum(hi, np.asarray(f1.dims) - 1)
    return lo, hi


def score_direct(f1: AffinityField, f2: AffinityField, pose: Pose) -> complex:
    """Cross-correlation ``sum_p rho1(p) rho2(pose^-1 p) dv`` over f1's nodes.

    ``rho2`` is read by multilinear interpolation in f2's local frame and is
    zero outside its grid.  The product is taken without conjugation.
    """
    check_compatible(f1, f2)
    R = pose.matrix()
    t = pose.translation
    lo, hi = _overlap_block(f1, f2, R, t)
    if np.any(hi < lo):
        return 0j
    fn = _score2 if f1.dim == 2 else _score3
    acc = fn(f1.data, f1.origin, f2.data, f2.origin, f1.spacing, np.ascontiguousarray(R),
             t, lo, hi)
    return complex(acc) * f1.spacing ** f1.dim


def real_score(f: complex) -> float:
    """The scalar maximized by every search: the real part of the complex score."""
    return float(np.real(f))


def make_score_fn(f1: AffinityField, f2: AffinityField):
    """Pose -> real score closure used by the optimizers."""
    check_compatible(f1, f2)

    def fn(pose: Pose) -> float:
        return real_score(score_direct(f1, f2, pose))

    return fn
