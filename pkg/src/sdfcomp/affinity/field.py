"""Point and grid evaluation of the skeletal density affinity."""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geometry.queries import signed_distance_many
from ..geometry.solid import BoundarySolid
from . import _quad
from .kernel import INV_SQRT_2PI, KernelParams

# subdivision cap for the triangle quadrature (4**14 leaves per element)
MAX_DEPTH = 14
# default memory budget for a single field, in grid nodes
MAX_NODES = 20_000_000
_CHUNK = 256


class CapacityError(MemoryError):
    """Requested grid or transform exceeds the declared memory budget."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice ``origin + spacing * index`` with ``dims`` nodes per axis."""

    origin: np.ndarray
    spacing: float
    dims: tuple

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64))
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        if not self.spacing > 0:
            raise ValueError("grid spacing must be positive")
        if len(self.dims) != len(self.origin) or min(self.dims) < 1:
            raise ValueError("dims must give a positive count per axis")

    @property
    def dim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    @property
    def upper(self) -> np.ndarray:
        return self.origin + self.spacing * (np.asarray(self.dims) - 1)

    def axes(self):
        return [self.origin[a] + self.spacing * np.arange(n) for a, n in enumerate(self.dims)]

    def nodes(self) -> np.ndarray:
        """All node coordinates in row-major (C) order, shape (size, dim)."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def grid_for_solid(S: BoundarySolid, spacing: float, margin: float = 1.0) -> GridSpec:
    """Grid covering the bounding box of S padded by ``margin``.

    The origin is snapped to an integer multiple of ``spacing`` so that grids
    built for different shapes share one lattice.
    """
    lo, hi = S.bbox
    origin = np.floor((lo - margin) / spacing) * spacing
    dims = np.ceil((hi + margin - origin) / spacing - 1e-9).astype(int) + 1
    return GridSpec(origin, spacing, tuple(dims))


@dataclass
class AffinityField:
    """Complex affinity samples on a uniform grid.

    ``data`` has shape ``grid.dims``; ``kind`` is ``"sdf"`` or ``"dsl"``.
    """

    grid: GridSpec
    data: np.ndarray
    params: KernelParams
    shape_id: str = ""
    kind: str = "sdf"
    meta: dict = field(default_factory=dict)

    @property
    def origin(self):
        return self.grid.origin

    @property
    def spacing(self):
        return self.grid.spacing

    @property
    def dims(self):
        return self.grid.dims

    @property
    def dim(self):
        return self.grid.dim

    def centroid(self) -> np.ndarray:
        """Geometric center of the grid box (the rotation center for resampling)."""
        return 0.5 * (self.grid.origin + self.grid.upper)

    def copy(self, data=None) -> "AffinityField":
        return AffinityField(self.grid, self.data.copy() if data is None else data,
                             self.params, self.shape_id, self.kind, dict(self.meta))

    # --- IO --------------------------------------------------------------

    def save(self, path) -> None:
        """Binary layout: ``SDF1``, dimension, dims, origin, spacing, params, data."""
        p = self.params
        head = [b"SDF1", struct.pack("<I", self.dim)]
        head.append(struct.pack(f"<{self.dim}q", *self.dims))
        head.append(struct.pack(f"<{self.dim}d", *self.origin))
        head.append(struct.pack(f"<{self.dim}d", *([self.spacing] * self.dim)))
        head.append(struct.pack("<6d", p.sigma, p.lambda1, p.lambda2, p.eps,
                                p.probe_radius, p.dgamma))
        for s in (self.kind, self.shape_id):
            b = s.encode()
            head.append(struct.pack("<I", len(b)) + b)
        body = np.ascontiguousarray(self.data, dtype=np.complex64).tobytes()
        Path(path).write_bytes(b"".join(head) + body)

    @classmethod
    def load(cls, path) -> "AffinityField":
        raw = Path(path).read_bytes()
        if raw[:4] != b"SDF1":
            raise ValueError(f"{path}: not an affinity field file")
        off = 4
        (dim,) = struct.unpack_from("<I", raw, off)
        off += 4
        dims = struct.unpack_from(f"<{dim}q", raw, off)
        off += 8 * dim
        origin = struct.unpack_from(f"<{dim}d", raw, off)
        off += 8 * dim
        spacing = struct.unpack_from(f"<{dim}d", raw, off)
        off += 8 * dim
        vals = struct.unpack_from("<6d", raw, off)
        off += 48
        strs = []
        for _ in range(2):
            (n,) = struct.unpack_from("<I", raw, off)
            off += 4
            strs.append(raw[off:off + n].decode())
            off += n
        data = np.frombuffer(raw, dtype=np.complex64, offset=off).reshape(dims)
        params = KernelParams(*vals)
        grid = GridSpec(origin, spacing[0], dims)
        return cls(grid, data.astype(np.complex128), params, strs[1], strs[0])

    def write_csv(self, path) -> None:
        """One line per node: ``x,y[,z],re,im`` in row-major order."""
        pts = self.grid.nodes()
        names = "xyz"[: self.dim]
        arr = np.column_stack([pts, self.data.real.ravel(), self.data.imag.ravel()])
        np.savetxt(path, arr, delimiter=",", fmt="%.17e",
                   header=",".join([*names, "re", "im"]), comments="")


# --- evaluation -------------------------------------------------------------

def _points_call(fn, pts, S, *args, threads=1):
    pts = np.ascontiguousarray(np.atleast_2d(pts), dtype=np.float64)
    if pts.shape[1] != S.dim:
        raise ValueError(f"points must have {S.dim} coordinates")
    ia = S.index.arrays
    common = (S.ev, S.normals, *ia)

    def run(chunk):
        return fn(chunk, *common, S.tol, *args)

    if threads <= 1 or len(pts) <= _CHUNK:
        return run(pts)
    chunks = [pts[i:i + _CHUNK] for i in range(0, len(pts), _CHUNK)]
    with ThreadPoolExecutor(threads) as pool:
        parts = list(pool.map(run, chunks))
    return np.concatenate(parts)


def affinity_many(points, S: BoundarySolid, params: KernelParams, threads: int = 1) -> np.ndarray:
    """Affinity at each row of ``points``; see :func:`affinity_at`."""
    return _points_call(_quad.affinity_points, points, S, params.sigma, params.lambda1,
                        params.lambda2, params.eps, params.dgamma, MAX_DEPTH, threads=threads)


def affinity_at(p, S: BoundarySolid, params: KernelParams) -> complex:
    """Skeletal density affinity of S seen from p.

    Integrates ``phi(zeta) cos(theta) ds`` over the boundary, restricted to the
    eps-contact region when ``params.eps > 0``.  The angle element is the
    plain plane angle (2D) or solid angle (3D), so a surrounding boundary
    subtends 2 pi or 4 pi.  Points within the boundary tolerance return 0.
    """
    return complex(affinity_many(np.asarray(p, dtype=np.float64)[None, :], S, params)[0])


def spatial_angle(p, S: BoundarySolid, eps: float, dgamma: float = 1e-4) -> float:
    """Signed spatial angle under which p sees its eps-contact region."""
    pts = np.asarray(p, dtype=np.float64)[None, :]
    return float(_points_call(_quad.spatial_angle_points, pts, S, eps, dgamma, MAX_DEPTH)[0])


def _check_capacity(grid: GridSpec, max_nodes):
    if grid.size > max_nodes:
        raise CapacityError(f"grid of {grid.size} nodes exceeds the budget of {max_nodes}")


def affinity_field(S: BoundarySolid, grid: GridSpec, params: KernelParams, threads: int = 1,
                   max_nodes: int = MAX_NODES) -> AffinityField:
    """Sample the affinity of S at every node of ``grid``.

    Nodes are split into fixed chunks, so the result does not depend on the
    number of worker threads.
    """
    _check_capacity(grid, max_nodes)
    if grid.dim != S.dim:
        raise ValueError("grid and solid dimensions differ")
    vals = affinity_many(grid.nodes(), S, params, threads=threads)
    return AffinityField(grid, vals.reshape(grid.dims), params, S.name, "sdf")


# --- double-skin baseline ---------------------------------------------------

def _dsl(xi, params):
    R, s = params.probe_radius, params.sigma
    g1 = INV_SQRT_2PI / s * np.exp(-0.5 * ((xi / R - 1.0) / s) ** 2)
    g2 = INV_SQRT_2PI / s * np.exp(-0.5 * ((xi / R + 1.0) / s) ** 2)
    return params.lambda1 * g1 + 1j * params.lambda2 * g2


def dsl_affinity_at(p, S: BoundarySolid, params: KernelParams) -> complex:
    """Double-skin baseline ``lambda1 g(xi/R - 1) + i lambda2 g(xi/R + 1)``."""
    xi = signed_distance_many(np.asarray(p, dtype=np.float64)[None, :], S)
    return complex(_dsl(xi, params)[0])


def dsl_field(S: BoundarySolid, grid: GridSpec, params: KernelParams,
              max_nodes: int = MAX_NODES) -> AffinityField:
    _check_capacity(grid, max_nodes)
    xi = signed_distance_many(grid.nodes(), S)
    return AffinityField(grid, _dsl(xi, params).reshape(grid.dims), params, S.name, "dsl")


def field_for_solid(S, params, spacing=0.05, margin=1.0, baseline="sdf", threads=1,
                    max_nodes=MAX_NODES) -> AffinityField:
    """Convenience: grid_for_solid followed by the SDF or DSL sampler."""
    grid = grid_for_solid(S, spacing, margin)
    if baseline == "dsl":
        return dsl_field(S, grid, params, max_nodes=max_nodes)
    return affinity_field(S, grid, params, threads=threads, max_nodes=max_nodes)


__all__ = [
    "AffinityField", "CapacityError", "GridSpec", "affinity_at", "affinity_field",
    "affinity_many", "dsl_affinity_at", "dsl_field", "field_for_solid", "grid_for_solid",
    "spatial_angle",
]
