"""Readers and writers for ``poly2d`` loop files and OFF triangle meshes."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .solid import BoundarySolid, GeometryError, polygon


class BoundaryParseError(GeometryError):
    pass


def load_boundary(path, format: str | None = None, h_max: float | None = None) -> BoundarySolid:
    """Read a boundary file.

    Parameters
    ----------
    path : path-like
    format : {"poly2d", "off3d"}, optional
        Inferred from the extension (``.poly``/``.poly2d`` vs ``.off``) when omitted.
    h_max : float, optional
        Maximum element diameter; longer elements are subdivided.
    """
    path = Path(path)
    if format is None:
        format = "off3d" if path.suffix.lower() == ".off" else "poly2d"
    if h_max is not None and not h_max > 0:
        raise GeometryError("h_max must be positive")
    text = path.read_text()
    if format == "poly2d":
        return polygon(_parse_poly2d(text), h_max=h_max, name=path.stem)
    if format == "off3d":
        V, F = _parse_off(text)
        return BoundarySolid.from_arrays(V, F, h_max=h_max, name=path.stem)
    raise ValueError(f"unknown boundary format {format!r}")


def _parse_poly2d(text):
    loops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "loop":
            loops.append([])
        elif tok[0] == "v":
            if not loops:
                raise BoundaryParseError(f"line {lineno}: vertex before any 'loop'")
            if len(tok) != 3:
                raise BoundaryParseError(f"line {lineno}: expected 'v <x> <y>'")
            try:
                loops[-1].append((float(tok[1]), float(tok[2])))
            except ValueError as exc:
                raise BoundaryParseError(f"line {lineno}: {exc}") from None
        else:
            raise BoundaryParseError(f"line {lineno}: unknown directive {tok[0]!r}")
    if not loops:
        raise BoundaryParseError("no loops found")
    return loops


def _parse_off(text):
    tokens = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            tokens.append(line)
    if not tokens or not tokens[0].startswith("OFF"):
        raise BoundaryParseError("missing OFF header")
    head = tokens[0][3:].split()
    body = tokens[1:]
    if not head:
        if not body:
            raise BoundaryParseError("missing counts line")
        head = body[0].split()
        body = body[1:]
    try:
        nv, nf = int(head[0]), int(head[1])
        V = np.array([[float(x) for x in body[i].split()[:3]] for i in range(nv)])
        faces = []
        for i in range(nv, nv + nf):
            tok = [int(x) for x in body[i].split()]
            k, idx = tok[0], tok[1:1 + tok[0]]
            if k < 3 or len(idx) != k:
                raise BoundaryParseError(f"bad face record {body[i]!r}")
            faces.extend((idx[0], idx[j], idx[j + 1]) for j in range(1, k - 1))
    except (IndexError, ValueError) as exc:
        raise BoundaryParseError(f"malformed OFF body: {exc}") from None
    if V.shape != (nv, 3):
        raise BoundaryParseError("vertex records need three coordinates")
    return V, np.array(faces, dtype=np.int64)


def write_poly2d(path, S: BoundarySolid) -> None:
    """Write a 2D solid as loops in traversal order."""
    if S.dim != 2:
        raise ValueError("poly2d holds 2D boundaries only")
    nxt = {int(a): int(b) for a, b in S.elements}
    seen = set()
    lines = [f"# {S.name}" if S.name else "# boundary"]
    for start in sorted(nxt):
        if start in seen:
            continue
        lines.append("loop")
        v = start
        while v not in seen:
            seen.add(v)
            x, y = S.vertices[v]
            lines.append(f"v {x:.17g} {y:.17g}")
            v = nxt[v]
    Path(path).write_text("\n".join(lines) + "\n")


def write_off(path, S: BoundarySolid) -> None:
    if S.dim != 3:
        raise ValueError("OFF holds 3D meshes only")
    lines = ["OFF", f"{len(S.vertices)} {len(S.elements)} 0"]
    lines += [" ".join(f"{c:.17g}" for c in v) for v in S.vertices]
    lines += [f"3 {a} {b} {c}" for a, b, c in S.elements]
    Path(path).write_text("\n".join(lines) + "\n")
