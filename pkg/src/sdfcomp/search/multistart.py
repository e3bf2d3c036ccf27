"""Seeded multi-start CG search for the best relative pose of two parts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..affinity.field import field_for_solid
from ..affinity.kernel import KernelParams
from ..correlation.pose import Pose, quat_from_rotvec, rotation_error, translation_error
from ..correlation.score import make_score_fn
from .cg import LineSearch, cg_maximize


@dataclass(frozen=True)
class SearchConfig:
    """Multi-start settings.

    ``ranges`` holds one ``(lo, hi)`` pair per translation axis followed by the
    rotation range: the angle in 2D, the rotation angle about a uniformly
    random axis in 3D.  ``None`` picks ``[-2.5, 2.5]`` per axis and
    ``[-pi/4, pi/4]``.
    """

    n_starts: int = 25
    ranges: tuple | None = None
    iterations: int = 100
    delta_t: float = 0.01
    delta_r: float = 0.01
    seed: int = 0
    top_fraction: float = 0.2
    line_search: LineSearch = LineSearch()
    gtol: float = 1e-10

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if not (self.delta_t > 0 and self.delta_r > 0):
            raise ValueError("difference steps must be positive")
        if not 0 < self.top_fraction <= 1:
            raise ValueError("top_fraction must lie in (0, 1]")
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")

    def resolved_ranges(self, dim: int):
        if self.ranges is not None:
            if len(self.ranges) != dim + 1:
                raise ValueError(f"expected {dim + 1} start ranges")
            return [tuple(map(float, r)) for r in self.ranges]
        return [(-2.5, 2.5)] * dim + [(-math.pi / 4, math.pi / 4)]

    @property
    def deltas(self):
        return (self.delta_t, self.delta_r)


def sample_starts(config: SearchConfig, dim: int) -> list[Pose]:
    rng = np.random.default_rng(config.seed)
    rs = config.resolved_ranges(dim)
    out = []
    for _ in range(config.n_starts):
        t = np.array([rng.uniform(lo, hi) for lo, hi in rs[:dim]])
        lo, hi = rs[dim]
        ang = rng.uniform(lo, hi)
        if dim == 2:
            out.append(Pose(t, ang))
        else:
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            out.append(Pose(t, quat_from_rotvec(axis * ang)))
    return out


@dataclass
class SearchEntry:
    start: Pose
    pose: Pose
    score: float
    trace: list


@dataclass
class SearchResult:
    """Runs ranked by descending real score; the first ``n_top`` are the top set."""

    entries: list
    n_top: int
    reference: Pose | None = None
    config: SearchConfig | None = None
    meta: dict = field(default_factory=dict)

    @property
    def best(self) -> SearchEntry:
        return self.entries[0]

    @property
    def top(self) -> list:
        return self.entries[: self.n_top]

    def _errors(self):
        if self.reference is None:
            return None
        te = np.array([translation_error(e.pose, self.reference) for e in self.top])
        re = np.array([rotation_error(e.pose, self.reference) for e in self.top])
        return te, re

    @property
    def trans_rmse(self) -> float | None:
        err = self._errors()
        return None if err is None else float(np.sqrt(np.mean(err[0] ** 2)))

    @property
    def rot_rmse(self) -> float | None:
        err = self._errors()
        return None if err is None else float(np.sqrt(np.mean(err[1] ** 2)))

    def table(self) -> str:
        lines = [f"{'rank':>4} {'score':>24} {'iters':>5}  pose"]
        for i, e in enumerate(self.entries):
            mark = "*" if i < self.n_top else " "
            pose = " ".join(f"{v:.17e}" for v in e.pose.as_vector())
            lines.append(f"{i + 1:>4}{mark}{e.score:>24.17e} {len(e.trace) - 1:>5}  {pose}")
        if self.reference is not None:
            lines.append(f"top-{self.n_top} translational RMSE {self.trans_rmse:.17e}")
            lines.append(f"top-{self.n_top} rotational RMSE {self.rot_rmse:.17e}")
        return "\n".join(lines)

    def log(self) -> dict:
        cfg = self.config
        return {
            "seed": None if cfg is None else cfg.seed,
            "config": None if cfg is None else {
                k: getattr(cfg, k) for k in ("n_starts", "iterations", "delta_t", "delta_r",
                                             "top_fraction", "gtol")},
            "ranges": None if cfg is None else cfg.resolved_ranges(self.entries[0].pose.dim),
            "runs": [{"start": [float(v) for v in e.start.as_vector()],
                      "pose": [float(v) for v in e.pose.as_vector()],
                      "score": e.score, "iterations": len(e.trace) - 1}
                     for e in self.entries],
            "trans_rmse": self.trans_rmse,
            "rot_rmse": self.rot_rmse,
            **self.meta,
        }


def search_fields(f1, f2, config: SearchConfig, reference: Pose | None = None) -> SearchResult:
    """Multi-start CG on prebuilt fields (fixed part f1, moving part f2)."""
    score_fn = make_score_fn(f1, f2)
    entries = []
    for start in sample_starts(config, f1.dim):
        r = cg_maximize(score_fn, start, config.iterations, config.deltas,
                        config.line_search, config.gtol)
        entries.append(SearchEntry(start, r.pose, r.score, r.trace))
    # stable sort: equal scores keep start order
    order = sorted(range(len(entries)), key=lambda i: -entries[i].score)
    entries = [entries[i] for i in order]
    n_top = max(1, int(round(config.top_fraction * len(entries))))
    return SearchResult(entries, n_top, reference, config)


def multistart_search(S1, S2, params: KernelParams, spacing: float = 0.05, config=None,
                      reference: Pose | None = None, margin: float = 1.0,
                      threads: int = 1) -> SearchResult:
    """Build both affinity fields and run :func:`search_fields`."""
    config = config or SearchConfig()
    f1 = field_for_solid(S1, params, spacing, margin, threads=threads)
    f2 = field_for_solid(S2, params, spacing, margin, threads=threads)
    return search_fields(f1, f2, config, reference)
