"""Damped rigid-body motion of the moving part in the score force field."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..affinity.field import field_for_solid
from ..correlation.pose import Pose, n_dof
from ..correlation.score import make_score_fn
from .cg import fd_gradient


@dataclass(frozen=True)
class SimParams:
    """Integrator settings.  ``gain=None`` scales the force so the initial max |F| is 1."""

    mass: float = 1.0
    inertia: float = 1.0
    damping_t: float = 2.0
    damping_r: float = 2.0
    gain: float | None = None
    dt: float = 0.01
    steps: int = 500
    delta_t: float = 0.01
    delta_r: float = 0.01

    def __post_init__(self):
        if not (self.mass > 0 and self.inertia > 0):
            raise ValueError("mass and inertia must be positive")
        if not (self.damping_t >= 0 and self.damping_r >= 0):
            raise ValueError("damping must be non-negative")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


@dataclass
class State:
    t: float
    pose: Pose
    velocity: np.ndarray
    score: float
    energy: float


@dataclass
class Trajectory:
    """Recorded states; ``energy = -gain * score`` is the potential."""

    dt: float
    states: list = field(default_factory=list)
    mass: float = 1.0
    inertia: float = 1.0
    damping: tuple = (2.0, 2.0)
    gain: float = 1.0

    def kinetic(self, s: State) -> float:
        d = s.pose.dim
        v = s.velocity
        return 0.5 * self.mass * float(v[:d] @ v[:d]) + 0.5 * self.inertia * float(v[d:] @ v[d:])

    @property
    def scores(self) -> np.ndarray:
        return np.array([s.score for s in self.states])

    def write_csv(self, path) -> None:
        if not self.states:
            raise ValueError("empty trajectory")
        dim = self.states[0].pose.dim
        names = ["x", "y", "theta"] if dim == 2 else ["tx", "ty", "tz", "qw", "qx", "qy", "qz"]
        lines = [",".join(["t", *names, "score", "energy"])]
        for s in self.states:
            vals = [s.t, *s.pose.as_vector(), s.score, s.energy]
            lines.append(",".join(f"{v:.17e}" for v in vals))
        Path(path).write_text("\n".join(lines) + "\n")


def simulate(score_fn, start: Pose, sim: SimParams = SimParams(), velocity=None) -> Trajectory:
    """Semi-implicit Euler under ``F = gain * grad(score) - damping * v``.

    Velocities are updated first, then the pose moves with the new velocity;
    rotation steps are body-frame in 3D.

    Raises
    ------
    FloatingPointError
        When the state becomes non-finite.
    """
    dim = start.dim
    nd = n_dof(dim)
    deltas = (sim.delta_t, sim.delta_r)
    m = np.array([sim.mass] * dim + [sim.inertia] * (nd - dim))
    c = np.array([sim.damping_t] * dim + [sim.damping_r] * (nd - dim))
    v = np.zeros(nd) if velocity is None else np.asarray(velocity, dtype=np.float64).copy()
    pose = start
    score = score_fn(pose)
    grad = fd_gradient(score_fn, pose, deltas)
    if sim.gain is None:
        gmax = float(np.abs(grad).max())
        gain = 1.0 / gmax if gmax > 0 else 0.0
    else:
        gain = float(sim.gain)
    traj = Trajectory(sim.dt, [], sim.mass, sim.inertia, (sim.damping_t, sim.damping_r), gain)
    traj.states.append(State(0.0, pose, v.copy(), score, -gain * score))
    for n in range(1, sim.steps + 1):
        force = gain * grad - c * v
        v = v + sim.dt * force / m
        pose = pose.stepped(sim.dt * v)
        score = score_fn(pose)
        if not (np.all(np.isfinite(v)) and math.isfinite(score)
                and np.all(np.isfinite(pose.as_vector()))):
            raise FloatingPointError(
                f"non-finite state at step {n}: pose={pose.as_vector()}, v={v}, score={score}")
        traj.states.append(State(n * sim.dt, pose, v.copy(), score, -gain * score))
        grad = fd_gradient(score_fn, pose, deltas) if gain != 0.0 else np.zeros(nd)
    return traj


def dynamics_simulate(S1, S2, params, start: Pose, sim: SimParams = SimParams(),
                      spacing: float = 0.05, margin: float = 1.0, threads: int = 1) -> Trajectory:
    """Build both fields and run :func:`simulate` on their real score."""
    f1 = field_for_solid(S1, params, spacing, margin, threads=threads)
    f2 = field_for_solid(S2, params, spacing, margin, threads=threads)
    return simulate(make_score_fn(f1, f2), start, sim)
