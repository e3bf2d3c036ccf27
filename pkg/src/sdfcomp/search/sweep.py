"""Relaxed-score response to the penalty factor and the thickness factor."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..affinity.field import AffinityField, field_for_solid
from ..affinity.kernel import KernelParams
from ..correlation.pose import Pose, rotation_error, translation_error
from ..correlation.score import make_score_fn
from ..geometry.queries import pmc_many
from .cg import LineSearch, cg_maximize

RELAX_STEPS = 10


@dataclass(frozen=True)
class SweepRow:
    value: float
    score: float
    trans_err: float
    rot_err: float
    pose: Pose


def _split_field(S, params, spacing, margin, threads):
    # the affinity is lambda1 * (exterior part) + lambda2 * (interior part),
    # so one unit-weight evaluation serves every penalty value
    unit = params.replace(lambda1=1.0, lambda2=1.0)
    f = field_for_solid(S, unit, spacing, margin, threads=threads)
    inside = (pmc_many(f.grid.nodes(), S) < 0).reshape(f.dims)
    return f, inside


def _scaled(f: AffinityField, inside, params: KernelParams) -> AffinityField:
    data = np.where(inside, params.lambda2 * f.data, params.lambda1 * f.data)
    return AffinityField(f.grid, data, params, f.shape_id, f.kind)


def relax(f1, f2, reference: Pose, steps: int = RELAX_STEPS, deltas=(0.01, 0.01),
          line_search: LineSearch | None = None):
    return cg_maximize(make_score_fn(f1, f2), reference, steps, deltas, line_search)


def parameter_sweep(S1, S2, base: KernelParams, axis: str, values, reference: Pose,
                    spacing: float = 0.05, margin: float = 1.0, steps: int = RELAX_STEPS,
                    deltas=(0.01, 0.01), threads: int = 1,
                    cache: dict | None = None) -> list[SweepRow]:
    """Relax from the reference pose for each parameter value.

    ``axis="penalty"`` sets ``lambda2 / lambda1`` to each value keeping the
    product ``lambda1 * lambda2`` of ``base``; ``axis="sigma"`` sets the
    thickness factor.  Pass the same ``cache`` dict to several sweeps over
    one shape pair to reuse fields whose parameters coincide.
    """
    values = list(values)
    if not values:
        raise ValueError("values must be nonempty")
    if axis not in ("penalty", "sigma"):
        raise ValueError(f"unknown sweep axis {axis!r}")
    rows = []
    cache = {} if cache is None else cache
    if axis == "penalty":
        u1, in1 = _split_field(S1, base, spacing, margin, threads)
        u2, in2 = _split_field(S2, base, spacing, margin, threads)
    for v in values:
        if axis == "penalty":
            p = base.with_penalty(float(v))
            f1, f2 = _scaled(u1, in1, p), _scaled(u2, in2, p)
            cache.setdefault((p, spacing, margin), (f1, f2))
        else:
            p = base.replace(sigma=float(v))
            key = (p, spacing, margin)
            if key not in cache:
                cache[key] = (field_for_solid(S1, p, spacing, margin, threads=threads),
                              field_for_solid(S2, p, spacing, margin, threads=threads))
            f1, f2 = cache[key]
        r = relax(f1, f2, reference, steps, deltas)
        rows.append(SweepRow(float(v), r.score, translation_error(r.pose, reference),
                             rotation_error(r.pose, reference), r.pose))
    return rows


def loglog_slope(rows) -> float:
    """Least-squares slope of log(score) against log(value)."""
    x = np.log([r.value for r in rows])
    y = np.log([r.score for r in rows])
    return float(np.polyfit(x, y, 1)[0])


def write_sweep_csv(path, axis: str, rows) -> None:
    lines = [f"{axis},score,trans_err,rot_err"]
    for r in rows:
        lines.append(f"{r.value:.17e},{r.score:.17e},{r.trans_err:.17e},{r.rot_err:.17e}")
    Path(path).write_text("\n".join(lines) + "\n")
