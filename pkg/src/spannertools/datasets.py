"""Point-set generators and the text file formats used by the CLI.

Generators are deterministic per seed.  The uniform and clustered domains
scale with sqrt(n) so point density stays constant across sizes, which
keeps per-point quantities (edges per point, pairs per point) comparable
between runs of different sizes.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .core import PointSet, SpannerGraph, distance

__all__ = [
    "GeneratorSpec",
    "generate",
    "write_points",
    "read_points",
    "write_edges",
    "read_edges",
    "graph_from_edges",
]

KINDS = ("uniform", "clustered", "gamma")

# Clustered data: each cluster is a unit square of points inside the
# sqrt(n)-sided domain, i.e. clusters are strongly localized.
CLUSTER_EXTENT = 1.0


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    seed: int
    gamma_shape: float = 0.75

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}, expected one of {KINDS}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not self.gamma_shape > 0.0:
            raise ValueError("gamma_shape must be positive")


def _draw(spec: GeneratorSpec, rng: np.random.Generator):
    n = spec.n
    side = math.sqrt(n)
    if spec.kind == "uniform":
        pts = rng.random((n, 2)) * side

        def redraw(i):
            return rng.random(2) * side

    elif spec.kind == "clustered":
        k = math.isqrt(n)
        if k * k < n:
            k += 1
        centers = rng.random((k, 2)) * side
        offsets = rng.random((k, k, 2)) * CLUSTER_EXTENT
        pts = (centers[:, None, :] + offsets).reshape(k * k, 2)[:n]

        def redraw(i):
            return centers[i // k] + rng.random(2) * CLUSTER_EXTENT

    else:  # gamma
        pts = rng.gamma(spec.gamma_shape, 1.0, size=(n, 2))

        def redraw(i):
            return rng.gamma(spec.gamma_shape, 1.0, size=2)

    return pts, redraw


def generate(spec: GeneratorSpec) -> PointSet:
    """Generate a point set; exact duplicates are redrawn until unique."""
    rng = np.random.default_rng(spec.seed)
    pts, redraw = _draw(spec, rng)
    while True:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == len(pts):
            break
        # every row that is not the first occurrence of its value gets redrawn
        dup_rows = sorted(set(range(len(pts))) - set(first.tolist()))
        for i in dup_rows:
            pts[i] = redraw(i)
    return PointSet(pts)


# -- file formats -----------------------------------------------------------
#
# Points file: first line "d n", then n lines of d space-separated floats
# written with shortest round-trip formatting.
# Edges file: first line "n m", then m lines "u v" (0-based, u < v), sorted,
# so files from equivalent builds diff clean.


def _atomic_write(path, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_points(path, ps: PointSet):
    n, d = ps.coords.shape
    lines = [f"{d} {n}"]
    for row in ps.coords.tolist():
        lines.append(" ".join(repr(c) for c in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_points(path) -> PointSet:
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'd n'")
        try:
            d, n = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ValueError(f"{path}: bad header {header!r}") from exc
        rows = []
        for lineno, line in enumerate(f, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != d:
                raise ValueError(f"{path}:{lineno}: expected {d} coordinates")
            rows.append([float(x) for x in parts])
    if len(rows) != n:
        raise ValueError(f"{path}: header said {n} points, file has {len(rows)}")
    return PointSet(rows)


def write_edges(path, g: SpannerGraph):
    lines = [f"{g.vertex_count} {g.edge_count}"]
    for u, v, _ in g.edges():
        lines.append(f"{u} {v}")
    _atomic_write(path, "\n".join(lines) + "\n")


def edges_file_bytes(g: SpannerGraph) -> bytes:
    """The exact bytes `write_edges` would produce."""
    lines = [f"{g.vertex_count} {g.edge_count}"]
    for u, v, _ in g.edges():
        lines.append(f"{u} {v}")
    return ("\n".join(lines) + "\n").encode()


def read_edges(path):
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'n m'")
        try:
            n, m = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ValueError(f"{path}: bad header {header!r}") from exc
        edges = []
        for lineno, line in enumerate(f, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v'")
            edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise ValueError(f"{path}: header said {m} edges, file has {len(edges)}")
    return n, edges


def graph_from_edges(ps: PointSet, n: int, edges) -> SpannerGraph:
    """Rebuild a graph from an edge index list; weights are recomputed
    Euclidean distances, never trusted from the file."""
    if n != len(ps):
        raise ValueError(f"edge file is for n={n}, point set has n={len(ps)}")
    g = SpannerGraph(n)
    coords = ps.coords
    for u, v in edges:
        g.add_edge(u, v, distance(coords[u], coords[v]))
    return g
