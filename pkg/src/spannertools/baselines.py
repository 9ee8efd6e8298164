"""Reference spanner constructions used as oracles and quality baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _fastpath
from .core import PointSet, SpannerGraph, _dijkstra_to_target, distance
from .wspd import build_split_tree, compute_wspd

__all__ = ["greedy_naive", "ThetaConfig", "theta_graph", "wspd_spanner"]

# greedy_naive materializes all n(n-1)/2 pairs; it is an oracle, not the
# scalable path, so refuse inputs past this soft cap.
NAIVE_CAP = 5000


def greedy_naive(ps: PointSet, t: float, cap: int = NAIVE_CAP) -> SpannerGraph:
    """Textbook quadratic greedy spanner.

    Scans all point pairs in ascending distance order (ties by the lower
    index pair) and adds an edge exactly when the current graph has no
    t-path.  Each distance check is a Dijkstra truncated at t|uv|, so space
    stays O(n + |E|) even though the pair list is quadratic.
    """
    if not t > 1.0:
        raise ValueError(f"stretch factor must exceed 1, got {t}")
    n = len(ps)
    if n > cap:
        raise ValueError(f"greedy_naive is capped at n={cap} points, got {n}")
    coords = ps.coords
    us, vs = np.triu_indices(n, k=1)
    diff = coords[us] - coords[vs]
    dists = np.sqrt((diff * diff).sum(axis=1))
    # Stable sort on distance: ties fall back to the (u, v) lexicographic
    # order in which triu_indices emits the pairs.
    order = np.argsort(dists, kind="stable")

    g = SpannerGraph(n)
    if _fastpath.HAVE_FASTPATH:
        nbr = np.empty((n, 8), dtype=np.int32)
        wts = np.empty((n, 8), dtype=np.float64)
        deg = np.zeros(n, dtype=np.int32)
        dist_buf = np.full(n, math.inf)
        touched_buf = np.empty(n, dtype=np.int64)
        for k in order:
            u = int(us[k])
            v = int(vs[k])
            w = float(dists[k])
            limit = t * w
            if _fastpath.dijkstra_to_target(nbr, wts, deg, u, v, limit, dist_buf, touched_buf) > limit:
                g.add_edge(u, v, w)
                if deg[u] >= nbr.shape[1] or deg[v] >= nbr.shape[1]:
                    cap = nbr.shape[1] * 2
                    nbr2 = np.empty((n, cap), dtype=np.int32)
                    wts2 = np.empty((n, cap), dtype=np.float64)
                    nbr2[:, : nbr.shape[1]] = nbr
                    wts2[:, : nbr.shape[1]] = wts
                    nbr, wts = nbr2, wts2
                nbr[u, deg[u]] = v
                wts[u, deg[u]] = w
                deg[u] += 1
                nbr[v, deg[v]] = u
                wts[v, deg[v]] = w
                deg[v] += 1
    else:
        adj = g.adjacency
        for k in order:
            u = int(us[k])
            v = int(vs[k])
            w = float(dists[k])
            limit = t * w
            if _dijkstra_to_target(adj, u, v, limit) > limit:
                g.add_edge(u, v, w)
    return g


@dataclass(frozen=True)
class ThetaConfig:
    """Cone count for the theta-graph construction."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"need at least 2 cones, got {self.k}")


def theta_graph(ps: PointSet, cfg: ThetaConfig) -> SpannerGraph:
    """Theta-graph on a planar point set.

    Around every point the plane is divided into k half-open cones of angle
    2*pi/k (cone 0 starting at the positive x-axis); within each nonempty
    cone the point whose projection onto the cone bisector is smallest gets
    an edge.  Undirected duplicates are merged.
    """
    if ps.dimension != 2:
        raise ValueError("theta graphs are implemented for 2-d point sets only")
    k = cfg.k
    n = len(ps)
    coords = ps.coords
    step = 2.0 * math.pi / k
    bis_cos = np.cos((np.arange(k) + 0.5) * step)
    bis_sin = np.sin((np.arange(k) + 0.5) * step)

    g = SpannerGraph(n)
    for p in range(n):
        dx = coords[:, 0] - coords[p, 0]
        dy = coords[:, 1] - coords[p, 1]
        theta = np.arctan2(dy, dx)
        theta[theta < 0.0] += 2.0 * math.pi
        cone = (theta / step).astype(np.int64)
        cone[cone >= k] = 0  # angle rounded up to exactly 2*pi wraps to cone 0
        proj = dx * bis_cos[cone] + dy * bis_sin[cone]
        proj[p] = math.inf  # the apex itself is never a cone neighbor
        for c in range(k):
            sel = np.where(cone == c, proj, math.inf)
            q = int(np.argmin(sel))  # first minimum: ties go to the lowest index
            if sel[q] != math.inf and not g.has_edge(p, q):
                g.add_edge(p, q, distance(coords[p], coords[q]))
    return g


def wspd_spanner(ps: PointSet, t: float) -> SpannerGraph:
    """Spanner with one edge per well-separated pair.

    Uses the same separation 2t/(t-1) as the greedy construction and joins
    the lowest-index representatives of the two sides.  Every point pair is
    covered by exactly one decomposition pair, so the edge count equals the
    pair count.
    """
    if not t > 1.0:
        raise ValueError(f"stretch factor must exceed 1, got {t}")
    s = 2.0 * t / (t - 1.0)
    wspd = compute_wspd(build_split_tree(ps), s)
    nodes = wspd.tree.nodes
    g = SpannerGraph(len(ps))
    coords = ps.coords
    for i in range(wspd.pair_count):
        u = int(nodes[wspd.node_a[i]].point_indices.min())
        v = int(nodes[wspd.node_b[i]].point_indices.min())
        g.add_edge(u, v, distance(coords[u], coords[v]))
    return g
