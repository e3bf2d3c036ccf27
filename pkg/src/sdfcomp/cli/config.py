"""Run configuration: line-oriented ``key = value`` files with fixed sections."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

SECTIONS = ("run", "shape1", "shape2", "kernel", "grid", "search", "sim")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunSection:
    out: str = "out"
    seed: int = 0
    threads: int = 1


@dataclass(frozen=True)
class ShapeSection:
    """Either ``builtin`` (``example1:fixed``, ``mechanical3d:moving``, ...) or ``path``."""

    builtin: str = ""
    path: str = ""
    format: str = ""
    h_max: float = 0.0  # 0 keeps the input elements as they are


@dataclass(frozen=True)
class KernelSection:
    sigma: float = 0.5
    lambda1: float = 1.0
    lambda2: float = 3.0
    eps: float = 1.5
    probe_radius: float = 0.5
    dgamma: float = 1e-4
    baseline: str = "sdf"


@dataclass(frozen=True)
class GridSection:
    spacing: float = 0.05
    margin: float = 1.0
    max_nodes: int = 20_000_000


@dataclass(frozen=True)
class SearchSection:
    n_starts: int = 25
    iterations: int = 100
    delta_t: float = 0.01
    delta_r: float = 0.01
    top_fraction: float = 0.2
    trans_range: float = 2.5
    rot_range: float = math.pi / 4
    reference: str = ""  # pose vector; empty uses the built-in pair's fit if any
    pairing: str = "correct"
    rotations: int = 1
    top_k: int = 10
    plane: str = ""  # e.g. "z=0" keeps one slice in landscape CSVs
    sweep_axis: str = "penalty"
    sweep_values: str = "3,5,10"
    relax_steps: int = 10


@dataclass(frozen=True)
class SimSection:
    mass: float = 1.0
    inertia: float = 1.0
    damping_t: float = 2.0
    damping_r: float = 2.0
    gain: float = -1.0  # negative: scale so the initial max |F| is 1
    dt: float = 0.01
    steps: int = 500
    start: str = ""  # pose vector; empty offsets the reference by (0.5, 1.0, 0.2)


_TYPES = {"run": RunSection, "shape1": ShapeSection, "shape2": ShapeSection,
          "kernel": KernelSection, "grid": GridSection, "search": SearchSection,
          "sim": SimSection}


@dataclass(frozen=True)
class RunConfig:
    run: RunSection = field(default_factory=RunSection)
    shape1: ShapeSection = field(default_factory=lambda: ShapeSection(builtin="example1:fixed"))
    shape2: ShapeSection = field(default_factory=lambda: ShapeSection(builtin="example1:moving"))
    kernel: KernelSection = field(default_factory=KernelSection)
    grid: GridSection = field(default_factory=GridSection)
    search: SearchSection = field(default_factory=SearchSection)
    sim: SimSection = field(default_factory=SimSection)

    def with_values(self, section: str, **kw) -> "RunConfig":
        return replace(self, **{section: replace(getattr(self, section), **kw)})

    def dumps(self) -> str:
        """Normalized text: every section and key, in declaration order."""
        out = []
        for name in SECTIONS:
            sec = getattr(self, name)
            out.append(f"[{name}]")
            for f in fields(sec):
                out.append(f"{f.name} = {_format(getattr(sec, f.name))}")
            out.append("")
        return "\n".join(out)


def _format(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(section, key, raw: str, default):
    try:
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None
    return raw


def parse_config(text: str) -> RunConfig:
    """Parse config text; unknown sections or keys raise :class:`ConfigError`."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    cfg = RunConfig()
    for name in cp.sections():
        if name not in _TYPES:
            raise ConfigError(f"unknown section [{name}]")
        cur = getattr(cfg, name)
        known = {f.name: getattr(cur, f.name) for f in fields(cur)}
        vals = {}
        for key, raw in cp.items(name):
            if key not in known:
                raise ConfigError(f"[{name}] unknown key {key!r}")
            vals[key] = _coerce(name, key, raw.strip(), known[key])
        if name.startswith("shape") and "path" in vals and "builtin" not in vals:
            vals["builtin"] = ""  # a file replaces the default built-in shape
        cfg = cfg.with_values(name, **vals)
    return cfg


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def parse_vector(text: str):
    text = text.strip()
    if not text:
        return None
    return [float(x) for x in text.replace(",", " ").split()]
