"""Graph file formats shared repo-wide: dense CSV and undirected edge-list TSV.

Dense CSV: first line ``n=<N>,kind=<binary|weighted>``, then N comma-separated
rows.  Edge list TSV: first line ``n=<N>``, then one ``u<TAB>v<TAB>w`` line per
edge with 0-based endpoints, each undirected edge listed once.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .graphs import BINARY, WEIGHTED, Graph

DENSE = "dense"
EDGES = "edges"

_DENSE_HEADER = re.compile(r"^n=(\d+),kind=(binary|weighted)$")
_EDGES_HEADER = re.compile(r"^n=(\d+)$")


class GraphFormatError(ValueError):
    """Raised for malformed or inconsistent graph files."""


def _format_for(path: Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in (DENSE, EDGES):
            raise GraphFormatError(f"unknown graph format {fmt!r}")
        return fmt
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return DENSE
    if suffix == ".tsv":
        return EDGES
    raise GraphFormatError(
        f"cannot infer format from suffix {suffix!r}; pass fmt='dense' or 'edges'"
    )


def _fmt_weight(x: float) -> str:
    # repr round-trips float64 exactly; integers render without a trailing .0
    return str(int(x)) if x == int(x) else repr(float(x))


def save_graph(g: Graph, path, fmt: str | None = None) -> None:
    """Write a graph to disk; format inferred from the suffix unless given."""
    path = Path(path)
    fmt = _format_for(path, fmt)
    lines: list[str] = []
    if fmt == DENSE:
        lines.append(f"n={g.n},kind={g.kind}")
        for row in g.weights:
            lines.append(",".join(_fmt_weight(x) for x in row))
    else:
        lines.append(f"n={g.n}")
        us, vs = np.nonzero(np.triu(g.weights, 1))
        for u, v in zip(us.tolist(), vs.tolist()):
            lines.append(f"{u}\t{v}\t{_fmt_weight(g.weights[u, v])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_graph(path, fmt: str | None = None) -> Graph:
    """Read a graph written by :func:`save_graph` (lossless round trip)."""
    path = Path(path)
    fmt = _format_for(path, fmt)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines:
        raise GraphFormatError(f"{path}: empty graph file")
    return _parse_dense(lines, path) if fmt == DENSE else _parse_edges(lines, path)


def _parse_dense(lines: list[str], path: Path) -> Graph:
    m = _DENSE_HEADER.match(lines[0].strip())
    if m is None:
        raise GraphFormatError(
            f"{path}: malformed dense header {lines[0]!r}; expected 'n=<N>,kind=<binary|weighted>'"
        )
    n, kind = int(m.group(1)), m.group(2)
    rows = lines[1:]
    if len(rows) != n:
        raise GraphFormatError(f"{path}: expected {n} matrix rows, found {len(rows)}")
    w = np.empty((n, n))
    for i, row in enumerate(rows):
        parts = row.split(",")
        if len(parts) != n:
            raise GraphFormatError(f"{path}: row {i} has {len(parts)} values, expected {n}")
        try:
            w[i] = [float(x) for x in parts]
        except ValueError as exc:
            raise GraphFormatError(f"{path}: row {i} has a non-numeric entry") from exc
    if not np.array_equal(w, w.T):
        raise GraphFormatError(f"{path}: asymmetric adjacency matrix")
    if np.any(np.diagonal(w) != 0):
        raise GraphFormatError(f"{path}: nonzero diagonal entry (self-loop)")
    if kind == BINARY and not np.isin(w, (0.0, 1.0)).all():
        raise GraphFormatError(f"{path}: kind=binary but entries are not all 0/1")
    return Graph(w, kind)


def _parse_edges(lines: list[str], path: Path) -> Graph:
    m = _EDGES_HEADER.match(lines[0].strip())
    if m is None:
        raise GraphFormatError(f"{path}: malformed edge-list header {lines[0]!r}; expected 'n=<N>'")
    n = int(m.group(1))
    w = np.zeros((n, n))
    seen: set[tuple[int, int]] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError(f"{path}:{lineno}: expected 'u<TAB>v<TAB>w', got {line!r}")
        try:
            u, v, weight = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise GraphFormatError(f"{path}:{lineno}: non-numeric edge entry") from exc
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"{path}:{lineno}: vertex index out of range for n={n}")
        if u == v:
            raise GraphFormatError(f"{path}:{lineno}: self-loop {u}-{v} is not allowed")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"{path}:{lineno}: duplicate edge {u}-{v}")
        seen.add(key)
        w[u, v] = weight
        w[v, u] = weight
    kind = BINARY if np.isin(w, (0.0, 1.0)).all() else WEIGHTED
    return Graph(w, kind)
