"""Points, geometric graphs, and bounded shortest-path engines.

Everything downstream (split trees, greedy construction, baselines,
verification) is built on the primitives in this module.  Distances are
64-bit floats and all comparisons are exact unless a tolerance is stated
explicitly, so repeated runs on the same input are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np

__all__ = [
    "PointSet",
    "SpannerGraph",
    "GraphStats",
    "distance",
    "bounded_sssp",
    "astar_to_region",
]

_INF = math.inf

# Relative slack subtracted from A* heuristics.  It dwarfs the rounding
# error of the distance computations, so the heuristic can never
# overestimate a true remaining distance and A* keeps returning exactly
# the same distances as plain Dijkstra.
_H_SLACK = 1e-12


def distance(p, q) -> float:
    """Euclidean distance between two points.

    The accumulation order matches the vectorized ``sqrt(((a-b)**2).sum())``
    form used elsewhere, so scalar and vectorized code agree bit for bit.
    """
    if len(p) != len(q):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(q)}")
    acc = 0.0
    for a, b in zip(p, q):
        d = a - b
        acc += d * d
    return math.sqrt(acc)


class PointSet:
    """An ordered set of distinct d-dimensional points, identified 0..n-1."""

    __slots__ = ("coords", "_tuples")

    def __init__(self, coords):
        arr = np.array(coords, dtype=np.float64, copy=True, order="C")
        if arr.ndim != 2:
            raise ValueError("expected an (n, d) array of coordinates")
        n, d = arr.shape
        if n < 1:
            raise ValueError("a point set needs at least one point")
        if d < 1:
            raise ValueError("points need at least one coordinate")
        if not np.isfinite(arr).all():
            raise ValueError("all coordinates must be finite")
        if len(np.unique(arr, axis=0)) != n:
            raise ValueError("duplicate points are not allowed")
        arr.setflags(write=False)
        self.coords = arr
        self._tuples = None

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, i):
        return self.coords[i]

    def as_tuples(self):
        """Points as plain tuples; cached, for tight scalar loops."""
        if self._tuples is None:
            self._tuples = [tuple(row) for row in self.coords.tolist()]
        return self._tuples

    def __repr__(self):
        return f"PointSet(n={len(self)}, d={self.dimension})"


@dataclass(frozen=True)
class GraphStats:
    edge_count: int
    max_degree: int
    total_weight: float


class SpannerGraph:
    """Undirected weighted graph on vertex indices, stored as adjacency lists."""

    __slots__ = ("vertex_count", "adjacency", "edge_count", "_edge_keys")

    def __init__(self, vertex_count: int):
        if vertex_count < 0:
            raise ValueError("vertex_count must be nonnegative")
        self.vertex_count = vertex_count
        self.adjacency: list[list[tuple[int, float]]] = [[] for _ in range(vertex_count)]
        self.edge_count = 0
        self._edge_keys: set[tuple[int, int]] = set()

    def _check_vertex(self, u: int):
        if not 0 <= u < self.vertex_count:
            raise IndexError(f"vertex {u} out of range [0, {self.vertex_count})")

    def add_edge(self, u: int, v: int, w: float):
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in self._edge_keys:
            raise ValueError(f"edge {key} already present")
        if not (w > 0.0 and math.isfinite(w)):
            raise ValueError(f"edge weight must be positive and finite, got {w}")
        self._edge_keys.add(key)
        self.adjacency[u].append((v, w))
        self.adjacency[v].append((u, w))
        self.edge_count += 1

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        return key in self._edge_keys

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def neighbors(self, u: int):
        return self.adjacency[u]

    def edges(self):
        """All edges as (u, v, w) with u < v, sorted by (u, v)."""
        out = []
        for u, nbrs in enumerate(self.adjacency):
            for v, w in nbrs:
                if u < v:
                    out.append((u, v, w))
        out.sort(key=lambda e: (e[0], e[1]))
        return out

    def stats(self) -> GraphStats:
        max_deg = max((len(a) for a in self.adjacency), default=0)
        # fsum is order-independent up to correct rounding, so stats recomputed
        # from a reloaded edge file match the original bit for bit.
        total = math.fsum(w for _, _, w in self.edges())
        return GraphStats(self.edge_count, max_deg, total)

    def __repr__(self):
        return f"SpannerGraph(n={self.vertex_count}, m={self.edge_count})"


# ---------------------------------------------------------------------------
# Search engines.
#
# All engines prune relaxations whose tentative distance exceeds `bound`;
# any vertex left unreached therefore has true graph distance > bound.
# The fill variants write settled distances into a caller-provided float64
# buffer (preset to +inf) and return the list of touched vertices so the
# buffer can be reset in O(touched).


def _dijkstra_fill(adj, source, bound, dist):
    touched = [source]
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, v = heappop(heap)
        if d > bound:
            break
        if d > dist[v]:
            continue  # stale entry
        for w, wt in adj[v]:
            nd = d + wt
            if nd <= bound and nd < dist[w]:
                if dist[w] == _INF:
                    touched.append(w)
                dist[w] = nd
                heappush(heap, (nd, w))
    return touched


def _astar_fill(adj, pts, source, center, radius, bound, dist):
    """Goal-directed search toward the disk (center, radius).

    The returned buffer is exact for every vertex inside the disk (and for
    every vertex actually settled); other touched vertices may hold
    not-yet-converged upper bounds and must not be read.
    """
    sqrt = math.sqrt

    def h(v):
        acc = 0.0
        p = pts[v]
        for a, b in zip(p, center):
            d = a - b
            acc += d * d
        dd = sqrt(acc)
        val = dd - radius
        val -= _H_SLACK * (dd + radius)
        return val if val > 0.0 else 0.0

    touched = [source]
    dist[source] = 0.0
    heap = [(h(source), 0.0, source)]
    while heap:
        f, g, v = heappop(heap)
        if f > bound:
            break
        if g > dist[v]:
            continue
        for w, wt in adj[v]:
            ng = g + wt
            if ng <= bound and ng < dist[w]:
                if dist[w] == _INF:
                    touched.append(w)
                dist[w] = ng
                heappush(heap, (ng + h(w), ng, w))
    return touched


def _dijkstra_to_target(adj, source, target, bound):
    """Distance from source to target, or +inf if it exceeds `bound`."""
    if source == target:
        return 0.0
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, v = heappop(heap)
        if d > bound:
            break
        if v == target:
            return d
        if d > dist[v]:
            continue
        for w, wt in adj[v]:
            nd = d + wt
            if nd <= bound and nd < dist.get(w, _INF):
                dist[w] = nd
                heappush(heap, (nd, w))
    return _INF


def _astar_to_target(adj, pts, source, target, bound):
    """A* variant of `_dijkstra_to_target` with a point goal."""
    if source == target:
        return 0.0
    tx = pts[target]
    sqrt = math.sqrt

    def h(v):
        acc = 0.0
        p = pts[v]
        for a, b in zip(p, tx):
            d = a - b
            acc += d * d
        return sqrt(acc) * (1.0 - _H_SLACK)

    dist = {source: 0.0}
    heap = [(h(source), 0.0, source)]
    while heap:
        f, g, v = heappop(heap)
        if f > bound:
            break
        if v == target:
            return g
        if g > dist[v]:
            continue
        for w, wt in adj[v]:
            ng = g + wt
            if ng <= bound and ng < dist.get(w, _INF):
                dist[w] = ng
                heappush(heap, (ng + h(w), ng, w))
    return _INF


def bounded_sssp(g: SpannerGraph, source: int, bound: float) -> dict[int, float]:
    """Exact shortest-path distances from `source` up to `bound`.

    Returns a map holding delta(source, v) for every v with
    delta(source, v) <= bound; vertices absent from the map are farther
    than `bound`.  Truncation preserves exactness of everything reported.
    """
    g._check_vertex(source)
    if not bound >= 0.0:
        raise ValueError("bound must be nonnegative")
    dist = np.full(g.vertex_count, _INF)
    touched = _dijkstra_fill(g.adjacency, source, bound, dist)
    return {v: float(dist[v]) for v in touched}


def astar_to_region(
    g: SpannerGraph,
    ps: PointSet,
    source: int,
    center,
    radius: float,
    bound: float,
) -> dict[int, float]:
    """Exact bounded distances from `source` to all vertices in a goal disk.

    Equivalent to ``bounded_sssp`` filtered to vertices within `radius` of
    `center`, but goal-directed: the geometric distance to the disk guides
    the search and typically cuts the explored region sharply.
    """
    g._check_vertex(source)
    if not radius >= 0.0:
        raise ValueError("radius must be nonnegative")
    if not bound >= 0.0:
        raise ValueError("bound must be nonnegative")
    center_t = tuple(float(c) for c in center)
    if len(center_t) != ps.dimension:
        raise ValueError("center dimension does not match the point set")
    pts = ps.as_tuples()
    dist = np.full(g.vertex_count, _INF)
    touched = _astar_fill(g.adjacency, pts, source, center_t, radius, bound, dist)
    out = {}
    for v in touched:
        if distance(pts[v], center_t) <= radius:
            out[v] = float(dist[v])
    return out
