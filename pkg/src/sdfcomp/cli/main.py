"""``sdfcomp`` command line: affinity, landscape, search, simulate, sweep."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from ..affinity.field import CapacityError, field_for_solid
from ..affinity.kernel import KernelParams
from ..correlation.landscape import global_top_k, landscape_sweep, write_top_k
from ..correlation.pose import Pose
from ..correlation.rotations import sample_rotations
from ..geometry import shapes
from ..geometry.io import load_boundary
from ..geometry.solid import GeometryError
from ..search.cg import LineSearch
from ..search.dynamics import SimParams, simulate
from ..correlation.score import make_score_fn
from ..search.multistart import SearchConfig, search_fields
from ..search.sweep import parameter_sweep, write_sweep_csv
from .config import ConfigError, RunConfig, load_config, parse_vector

EXIT_IO = 2
EXIT_CAPACITY = 3
EXIT_INPUT = 4

_PAIRS = {f"example{k}": (lambda k=k: shapes.example_pair(k)) for k in (1, 2, 3)}
_PAIRS["mechanical3d"] = shapes.example_pair_3d


def _builtin(spec: str):
    name, _, role = spec.partition(":")
    if name not in _PAIRS or role not in ("fixed", "moving"):
        raise ConfigError(f"unknown built-in shape {spec!r}; use <pair>:fixed or <pair>:moving "
                          f"with pair in {sorted(_PAIRS)}")
    pair = _PAIRS[name]()
    return getattr(pair, role), pair


def load_shape(sec):
    """Return (solid, example pair or None)."""
    if sec.builtin and sec.path:
        raise ConfigError("give either builtin or path for a shape, not both")
    if sec.builtin:
        return _builtin(sec.builtin)
    if not sec.path:
        raise ConfigError("shape needs a builtin name or a path")
    S = load_boundary(sec.path, sec.format or None, sec.h_max or None)
    return S, None


def kernel_params(cfg: RunConfig) -> KernelParams:
    k = cfg.kernel
    return KernelParams(k.sigma, k.lambda1, k.lambda2, k.eps, k.probe_radius, k.dgamma)


def reference_pose(cfg: RunConfig, pair1, pair2):
    v = parse_vector(cfg.search.reference)
    if v is not None:
        return Pose.from_vector(v)
    if pair1 is not None and pair2 is not None and pair1.name == pair2.name:
        return Pose.from_vector(pair1.reference)
    return None


def search_config(cfg: RunConfig, dim: int) -> SearchConfig:
    s = cfg.search
    ranges = [(-s.trans_range, s.trans_range)] * dim + [(-s.rot_range, s.rot_range)]
    ls = LineSearch(initial=0.1 * max(cfg.grid.spacing, s.delta_r))
    return SearchConfig(s.n_starts, tuple(ranges), s.iterations, s.delta_t, s.delta_r,
                        cfg.run.seed, s.top_fraction, ls)


def _fields(cfg, params, baseline=None):
    S1, p1 = load_shape(cfg.shape1)
    S2, p2 = load_shape(cfg.shape2)
    g = cfg.grid
    b = baseline or cfg.kernel.baseline
    f1 = field_for_solid(S1, params, g.spacing, g.margin, b, cfg.run.threads, g.max_nodes)
    f2 = field_for_solid(S2, params, g.spacing, g.margin, b, cfg.run.threads, g.max_nodes)
    return f1, f2, p1, p2


def _out(cfg) -> Path:
    p = Path(cfg.run.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


# --- commands ---------------------------------------------------------------

def cmd_affinity(cfg: RunConfig, args) -> int:
    params = kernel_params(cfg)
    baseline = args.baseline or cfg.kernel.baseline
    out = _out(cfg)
    for tag, sec in (("shape1", cfg.shape1), ("shape2", cfg.shape2)):
        if not (sec.builtin or sec.path):
            continue
        S, _ = load_shape(sec)
        t0 = time.perf_counter()
        f = field_for_solid(S, params, cfg.grid.spacing, cfg.grid.margin, baseline,
                            cfg.run.threads, cfg.grid.max_nodes)
        wall = time.perf_counter() - t0
        f.save(out / f"{tag}.field")
        f.write_csv(out / f"{tag}.csv")
        print(f"{tag} {S.name} kind={f.kind} nodes={f.grid.size} "
              f"max|rho|={np.abs(f.data).max():.17e} wall={wall:.3f}s")
    return 0


def cmd_landscape(cfg: RunConfig, args) -> int:
    params = kernel_params(cfg)
    baseline = args.baseline or cfg.kernel.baseline
    f1, f2, _, _ = _fields(cfg, params, baseline)
    s = cfg.search
    rots = sample_rotations(s.rotations, f1.dim, (-s.rot_range, s.rot_range),
                            seed=cfg.run.seed if f1.dim == 3 and s.rotations > 1 else None)
    if f1.dim == 3 and s.rotations == 1:
        rots = [np.array([1.0, 0.0, 0.0, 0.0])]
    Ls = landscape_sweep(f1, f2, rots, cfg.run.threads, cfg.grid.max_nodes)
    plane = None
    if s.plane:
        axis, _, val = s.plane.partition("=")
        plane = {"xyz".index(axis.strip()): float(val)}
    out = _out(cfg)
    for i, L in enumerate(Ls):
        L.write_csv(out / f"landscape_{i:03d}.csv", plane)
    top = global_top_k(Ls, s.top_k)
    write_top_k(out / "top_k.json", top)
    support = sum(L.support_count() for L in Ls)
    print(f"rotations={len(Ls)} support={support} best={top[0][1]:.17e} "
          f"pose={' '.join(f'{v:.17e}' for v in top[0][0].as_vector())}")
    return 0


def cmd_search(cfg: RunConfig, args) -> int:
    params = kernel_params(cfg)
    pairing = args.pairing or cfg.search.pairing
    out = _out(cfg)
    if pairing == "cross":
        return _cross_table(cfg, params, out)
    f1, f2, p1, p2 = _fields(cfg, params, "sdf")
    ref = reference_pose(cfg, p1, p2)
    res = search_fields(f1, f2, search_config(cfg, f1.dim), ref)
    text = res.table()
    (out / "search_report.txt").write_text(text + "\n")
    (out / "search_log.json").write_text(json.dumps(res.log(), indent=1) + "\n")
    print(text)
    return 0


def _cross_table(cfg, params, out) -> int:
    names = [f"example{k}" for k in (1, 2, 3)]
    pairs = {n: _PAIRS[n]() for n in names}
    g = cfg.grid
    fx = {n: field_for_solid(pairs[n].fixed, params, g.spacing, g.margin, "sdf",
                             cfg.run.threads, g.max_nodes) for n in names}
    mv = {n: field_for_solid(pairs[n].moving, params, g.spacing, g.margin, "sdf",
                             cfg.run.threads, g.max_nodes) for n in names}
    sc = search_config(cfg, 2)
    best = {}
    for a in names:
        for b in names:
            r = search_fields(fx[a], mv[b], sc)
            best[a, b] = r.best.score
    lines = ["fixed,moving,best_score,ratio_to_correct"]
    for a in names:
        for b in names:
            lines.append(f"{a},{b},{best[a, b]:.17e},{best[a, b] / best[a, a]:.17e}")
    text = "\n".join(lines)
    (out / "cross_pairing.csv").write_text(text + "\n")
    print(text)
    return 0


def cmd_simulate(cfg: RunConfig, args) -> int:
    params = kernel_params(cfg)
    f1, f2, p1, p2 = _fields(cfg, params, "sdf")
    m = cfg.sim
    start = parse_vector(m.start)
    if start is None:
        ref = reference_pose(cfg, p1, p2) or Pose.identity(f1.dim)
        off = np.zeros(3 if f1.dim == 2 else 6)
        off[0], off[1] = 0.5, 1.0
        off[f1.dim] = 0.2
        start_pose = ref.stepped(off)
    else:
        start_pose = Pose.from_vector(start)
    sim = SimParams(m.mass, m.inertia, m.damping_t, m.damping_r,
                    None if m.gain < 0 else m.gain, m.dt, m.steps,
                    cfg.search.delta_t, cfg.search.delta_r)
    traj = simulate(make_score_fn(f1, f2), start_pose, sim)
    out = _out(cfg)
    traj.write_csv(out / "trajectory.csv")
    sc = traj.scores
    print(f"steps={len(traj.states) - 1} gain={traj.gain:.17e} "
          f"score {sc[0]:.17e} -> {sc[-1]:.17e}")
    return 0


def cmd_sweep(cfg: RunConfig, args) -> int:
    params = kernel_params(cfg)
    S1, p1 = load_shape(cfg.shape1)
    S2, p2 = load_shape(cfg.shape2)
    ref = reference_pose(cfg, p1, p2)
    if ref is None:
        raise ConfigError("a sweep needs a reference pose ([search] reference)")
    s = cfg.search
    values = parse_vector(s.sweep_values) or []
    rows = parameter_sweep(S1, S2, params, s.sweep_axis, values, ref, cfg.grid.spacing,
                           cfg.grid.margin, s.relax_steps, (s.delta_t, s.delta_r),
                           cfg.run.threads)
    out = _out(cfg)
    write_sweep_csv(out / f"sweep_{s.sweep_axis}.csv", s.sweep_axis, rows)
    for r in rows:
        print(f"{s.sweep_axis}={r.value:.17e} score={r.score:.17e} "
              f"trans_err={r.trans_err:.17e} rot_err={r.rot_err:.17e}")
    return 0


COMMANDS = {
    "affinity": cmd_affinity,
    "landscape": cmd_landscape,
    "search": cmd_search,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sdfcomp", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--seed", type=int, help="override [run] seed")
    common.add_argument("--out", help="override [run] out directory")
    common.add_argument("--threads", type=int, help="override [run] threads")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("affinity", "landscape"):
            p.add_argument("--baseline", choices=["sdf", "dsl"])
        if name == "search":
            p.add_argument("--pairing", choices=["correct", "cross"])
    return ap


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    over = {k: v for k, v in (("seed", args.seed), ("out", args.out),
                              ("threads", args.threads)) if v is not None}
    if over:
        cfg = cfg.with_values("run", **over)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except CapacityError as exc:
        print(f"sdfcomp: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, GeometryError, ValueError) as exc:
        print(f"sdfcomp: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"sdfcomp: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
