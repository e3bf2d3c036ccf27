"""Nonlinear conjugate-gradient ascent over rigid poses with difference gradients."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..correlation.pose import Pose, n_dof


def fd_gradient(score_fn, pose: Pose, deltas=(0.01, 0.01)) -> np.ndarray:
    """Central-difference gradient in generalized coordinates.

    Translation components step by ``deltas[0]``; rotation components by
    ``deltas[1]`` radians (the angle in 2D, body-frame axis-angle in 3D).
    """
    dt, dr = deltas
    if not (dt > 0 and dr > 0):
        raise ValueError("difference steps must be positive")
    g = np.empty(n_dof(pose.dim))
    for k in range(g.size):
        h = dt if k < pose.dim else dr
        g[k] = (score_fn(pose.perturbed(k, h)) - score_fn(pose.perturbed(k, -h))) / (2 * h)
    return g


@dataclass(frozen=True)
class LineSearch:
    """Backtracking Armijo search; the first trial may be grown by doubling.

    ``initial`` is the first trial step length (Euclidean, in generalized
    coordinates); later iterations start from the last accepted length.
    """

    initial: float = 0.005
    contraction: float = 0.5
    max_backtracks: int = 20
    c1: float = 1e-4
    max_step: float = 1.0
    expand: bool = True


@dataclass
class CGResult:
    pose: Pose
    score: float
    trace: list
    evaluations: int


def cg_maximize(score_fn, start: Pose, iterations: int = 100, deltas=(0.01, 0.01),
                line_search: LineSearch | None = None, gtol: float = 1e-10) -> CGResult:
    """Maximize ``score_fn`` by Polak-Ribiere conjugate gradients.

    The direction is reset to the gradient whenever it stops being an ascent
    direction or the line search fails along it.  Accepted steps satisfy the
    Armijo condition, so the recorded scores never decrease.  Stops after
    ``iterations`` steps or once the gradient norm drops below
    ``gtol * max(1, |score|)``.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    ls = line_search or LineSearch()
    count = [0]

    def f(p):
        count[0] += 1
        return score_fn(p)

    x = start
    fx = f(x)
    g = fd_gradient(f, x, deltas)
    d = g.copy()
    trace = [fx]
    alpha = ls.initial
    for _ in range(iterations):
        gn = float(np.linalg.norm(g))
        if not math.isfinite(fx) or gn < gtol * max(1.0, abs(fx)):
            break
        restarted = False
        if float(g @ d) <= 0:
            d = g.copy()
            restarted = True
        step = _line_search(f, x, fx, g, d, alpha, ls)
        if step is None and not restarted:
            d = g.copy()
            step = _line_search(f, x, fx, g, d, alpha, ls)
        if step is None:
            break
        alpha, x, fx = step
        g_new = fd_gradient(f, x, deltas)
        beta = max(0.0, float(g_new @ (g_new - g)) / float(g @ g))
        d = g_new + beta * d
        g = g_new
        trace.append(fx)
    return CGResult(x, fx, trace, count[0])


def _line_search(f, x: Pose, fx, g, d, alpha0, ls: LineSearch):
    u = d / np.linalg.norm(d)
    slope = float(g @ u)
    if slope <= 0:
        return None
    alpha = min(max(alpha0, ls.initial), ls.max_step)

    def ok(a, fa):
        return fa >= fx + ls.c1 * a * slope

    xa = x.stepped(alpha * u)
    fa = f(xa)
    if ok(alpha, fa):
        # grow while the larger step is still admissible and better
        while ls.expand and 2 * alpha <= ls.max_step:
            xb = x.stepped(2 * alpha * u)
            fb = f(xb)
            if not (ok(2 * alpha, fb) and fb > fa):
                break
            alpha, xa, fa = 2 * alpha, xb, fb
        return alpha, xa, fa
    for _ in range(ls.max_backtracks):
        alpha *= ls.contraction
        xa = x.stepped(alpha * u)
        fa = f(xa)
        if ok(alpha, fa):
            return alpha, xa, fa
    return None
