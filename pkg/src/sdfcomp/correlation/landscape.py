"""FFT sweep of the score over every lattice translation for a fixed rotation."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import fft

from ..affinity.field import MAX_NODES, AffinityField, CapacityError, GridSpec
from .pose import Pose, quat_normalize, quat_to_matrix, rot2
from .score import check_compatible, interp_points


def rotation_matrix(rotation, dim: int) -> np.ndarray:
    r = np.asarray(rotation, dtype=np.float64)
    if r.shape == (dim, dim):
        return r
    if dim == 2:
        return rot2(float(r))
    return quat_to_matrix(r)


def _rotation_param(rotation, dim):
    r = np.asarray(rotation, dtype=np.float64)
    if dim == 2:
        return float(r)
    return quat_normalize(r)


def resample_rotated(f2: AffinityField, R: np.ndarray) -> AffinityField:
    """The field ``x -> rho2(R^T x)``: f2 turned by R about its local origin.

    The target lattice shares f2's spacing and node alignment and is grown to
    hold the whole turned grid box; nodes that map outside f2 read 0.
    """
    g = f2.grid
    h = g.spacing
    corners = np.array(np.meshgrid(*[[g.origin[a], g.upper[a]] for a in range(g.dim)],
                                   indexing="ij")).reshape(g.dim, -1).T
    moved = corners @ R.T
    origin = g.origin + h * np.floor((moved.min(axis=0) - g.origin) / h + 1e-9)
    dims = np.ceil((moved.max(axis=0) - origin) / h - 1e-9).astype(int) + 1
    grid = GridSpec(origin, h, tuple(dims))
    src = np.ascontiguousarray(grid.nodes() @ R)
    data = interp_points(f2.data, f2.origin, h, src).reshape(grid.dims)
    return AffinityField(grid, data, f2.params, f2.shape_id, f2.kind)


def correlate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full linear cross-correlation ``c[k] = sum_i a[i] b[i - k]`` (no conjugation).

    Output index ``k + (len(b) - 1)`` per axis holds lag ``k``.
    """
    shape = [n1 + n2 - 1 for n1, n2 in zip(a.shape, b.shape)]
    fast = [fft.next_fast_len(n) for n in shape]
    rev = b[(slice(None, None, -1),) * b.ndim]
    A = fft.fftn(a, fast)
    B = fft.fftn(rev, fast)
    out = fft.ifftn(A * B)
    return out[tuple(slice(0, n) for n in shape)]


@dataclass
class ScoreLandscape:
    """Scores for one rotation at every lattice translation ``grid.origin + h k``."""

    rotation: object
    grid: GridSpec
    scores: np.ndarray

    @property
    def dim(self):
        return self.grid.dim

    def pose_at(self, index) -> Pose:
        t = self.grid.origin + self.grid.spacing * np.asarray(index, dtype=np.float64)
        return Pose(t, self.rotation)

    def index_of(self, pose: Pose):
        k = np.rint((pose.translation - self.grid.origin) / self.grid.spacing).astype(int)
        return tuple(k)

    def value_at(self, pose: Pose) -> complex:
        """Score at the lattice node nearest to the pose translation (0 off the lattice)."""
        k = self.index_of(pose)
        if any(i < 0 or i >= n for i, n in zip(k, self.grid.dims)):
            return 0j
        return complex(self.scores[k])

    def argmax(self) -> tuple[Pose, float]:
        k = np.unravel_index(int(np.argmax(self.scores.real)), self.scores.shape)
        return self.pose_at(k), float(self.scores.real[k])

    def top_k(self, k: int) -> list[tuple[Pose, float]]:
        flat = self.scores.real.ravel()
        k = min(k, flat.size)
        idx = np.argpartition(-flat, k - 1)[:k]
        idx = idx[np.lexsort((idx, -flat[idx]))]
        return [(self.pose_at(np.unravel_index(i, self.scores.shape)), float(flat[i]))
                for i in idx]

    def support_count(self, rel: float = 1e-9) -> int:
        """Number of nodes with ``|f| > rel * max |f|``."""
        a = np.abs(self.scores)
        return int(np.count_nonzero(a > rel * a.max())) if a.size else 0

    def write_csv(self, path, plane: dict | None = None) -> None:
        """``tx,ty[,tz],re,im`` per node; ``plane={axis: value}`` keeps one slice."""
        pts = self.grid.nodes()
        vals = self.scores.ravel()
        keep = np.ones(len(pts), dtype=bool)
        for axis, value in (plane or {}).items():
            k = int(round((value - self.grid.origin[axis]) / self.grid.spacing))
            keep &= np.isclose(pts[:, axis], self.grid.origin[axis] + k * self.grid.spacing)
        rot = np.atleast_1d(np.asarray(self.rotation, dtype=np.float64))
        names = ["tx", "ty", "tz"][: self.dim]
        head = "# rotation " + " ".join(f"{r:.17e}" for r in rot)
        arr = np.column_stack([pts[keep], vals.real[keep], vals.imag[keep]])
        np.savetxt(path, arr, delimiter=",", fmt="%.17e",
                   header=head + "\n" + ",".join([*names, "re", "im"]), comments="")


def translation_landscape(f1: AffinityField, f2: AffinityField, rotation,
                          max_nodes: int = MAX_NODES) -> ScoreLandscape:
    """Score of f2 turned by ``rotation`` at every lattice translation overlapping f1.

    Turning is about f2's local origin (the moving part's centroid); the
    translations reported are therefore pose translations.
    """
    check_compatible(f1, f2)
    dim = f1.dim
    R = rotation_matrix(rotation, dim)
    g = resample_rotated(f2, R)
    shape = [n1 + n2 - 1 for n1, n2 in zip(f1.dims, g.dims)]
    padded = int(np.prod([fft.next_fast_len(n) for n in shape]))
    if padded > max_nodes:
        raise CapacityError(f"FFT of {padded} nodes exceeds the budget of {max_nodes}")
    c = correlate(f1.data, g.data) * f1.spacing ** dim
    origin = f1.origin - g.grid.upper
    grid = GridSpec(origin, f1.spacing, tuple(c.shape))
    return ScoreLandscape(_rotation_param(rotation, dim), grid, c)


def landscape_sweep(f1, f2, rotations, threads: int = 1, max_nodes: int = MAX_NODES):
    """One landscape per rotation, in input order."""
    def run(r):
        return translation_landscape(f1, f2, r, max_nodes=max_nodes)

    if threads <= 1:
        return [run(r) for r in rotations]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(run, rotations))


def global_top_k(landscapes, k: int) -> list[tuple[Pose, float]]:
    """Best k lattice poses over a set of landscapes, ties broken by input order."""
    cands = []
    for li, L in enumerate(landscapes):
        for j, (pose, s) in enumerate(L.top_k(k)):
            cands.append((-s, li, j, pose))
    cands.sort(key=lambda c: c[:3])
    return [(c[3], -c[0]) for c in cands[:k]]


def write_top_k(path, entries) -> None:
    rows = [{"rank": i + 1, "pose": [float(x) for x in pose.as_vector()], "score": float(s)}
            for i, (pose, s) in enumerate(entries)]
    Path(path).write_text(json.dumps(rows, indent=1) + "\n")
