"""Dilation measurement and structural audits.

The dilation engines run on scipy's compiled Dijkstra, which is an
implementation independent from the hand-rolled search engines used during
construction -- a deliberate second route for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _scipy_dijkstra

from .core import PointSet, SpannerGraph
from .wspd import Wspd, _PairLookup, build_split_tree, compute_wspd, find_covering_pair

__all__ = [
    "DilationReport",
    "max_dilation_exact",
    "max_dilation_sampled",
    "WspdAuditReport",
    "audit_wspd",
    "OneEdgePerPairReport",
    "audit_one_edge_per_pair",
]

EXACT_CAP = 5000


@dataclass(frozen=True)
class DilationReport:
    max_dilation: float
    witness: tuple | None
    checked_pairs: int
    mode: str  # "exact" or "sampled"
    seed: int | None = None
    sample_count: int | None = None


def _graph_csr(g: SpannerGraph) -> csr_matrix:
    rows, cols, vals = [], [], []
    for u, nbrs in enumerate(g.adjacency):
        for v, w in nbrs:
            rows.append(u)
            cols.append(v)
            vals.append(w)
    n = g.vertex_count
    return csr_matrix((vals, (rows, cols)), shape=(n, n))


def max_dilation_exact(g: SpannerGraph, ps: PointSet, cap: int = EXACT_CAP) -> DilationReport:
    """Exact maximum dilation over all point pairs.

    Runs a full shortest-path computation from every vertex (in blocks) and
    maximizes delta(u, v) / |uv|.  A disconnected pair yields +inf with the
    offending pair as witness.
    """
    n = g.vertex_count
    if n != len(ps):
        raise ValueError("graph and point set sizes differ")
    if n > cap:
        raise ValueError(f"exact dilation is capped at n={cap}, got {n}")
    if n < 2:
        return DilationReport(1.0, None, 0, "exact")
    coords = ps.coords
    csr = _graph_csr(g)
    best = -math.inf
    witness = None
    block = max(1, min(n, 8_000_000 // max(n, 1)))
    for start in range(0, n, block):
        stop = min(n, start + block)
        sources = np.arange(start, stop)
        dg = _scipy_dijkstra(csr, directed=True, indices=sources)
        diff = coords[sources, None, :] - coords[None, :, :]
        de = np.sqrt((diff * diff).sum(axis=-1))
        # Only score ordered pairs u < v; mask the rest out.
        cols = np.arange(n)[None, :]
        valid = cols > sources[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(valid, dg / de, -math.inf)
        k = int(np.argmax(ratio))
        r = float(ratio.flat[k])
        if r > best:
            best = r
            witness = (int(start + k // n), int(k % n))
    total = n * (n - 1) // 2
    return DilationReport(best, witness, total, "exact")


def _sample_pairs(n: int, count: int, seed: int):
    """Deterministic uniform sample of distinct unordered vertex pairs."""
    total = n * (n - 1) // 2
    if count >= total:
        us, vs = np.triu_indices(n, k=1)
        return list(zip(us.tolist(), vs.tolist()))
    rng = np.random.default_rng(seed)
    seen = set()
    out = []
    while len(out) < count:
        batch = rng.integers(0, n, size=(max(64, count - len(out)), 2))
        for u, v in batch.tolist():
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            if key in seen:
                continue
            seen.add(key)
            out.append(key)
            if len(out) == count:
                break
    return out


def max_dilation_sampled(
    g: SpannerGraph, ps: PointSet, sample_count: int, seed: int
) -> DilationReport:
    """Dilation maximized over a random pair sample; a lower bound on the truth."""
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    n = g.vertex_count
    if n != len(ps):
        raise ValueError("graph and point set sizes differ")
    if n < 2:
        return DilationReport(1.0, None, 0, "sampled", seed, sample_count)
    pairs = _sample_pairs(n, sample_count, seed)
    coords = ps.coords
    csr = _graph_csr(g)

    by_source: dict[int, list[int]] = {}
    for u, v in pairs:
        by_source.setdefault(u, []).append(v)
    sources = sorted(by_source)
    best = -math.inf
    witness = None
    chunk = max(1, 4_000_000 // max(n, 1))
    for start in range(0, len(sources), chunk):
        batch = sources[start : start + chunk]
        dg = _scipy_dijkstra(csr, directed=True, indices=batch)
        for row, u in enumerate(batch):
            for v in by_source[u]:
                de = math.dist(coords[u], coords[v])
                r = float(dg[row, v]) / de
                if r > best:
                    best = r
                    witness = (u, v)
    return DilationReport(best, witness, len(pairs), "sampled", seed, sample_count)


@dataclass
class WspdAuditReport:
    pair_count: int
    coverage_checked: bool
    coverage_ok: bool | None
    separation_ok: bool
    sandwich_ok: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        parts = [self.separation_ok, self.sandwich_ok]
        if self.coverage_checked:
            parts.append(bool(self.coverage_ok))
        return all(parts)


def audit_wspd(ps: PointSet, s: float, coverage_cap: int = 300) -> WspdAuditReport:
    """Check a freshly computed decomposition: exactly-once coverage (up to
    `coverage_cap` points, exhaustively), separation, and the metric
    sandwich min <= ell <= max (plus the 3/2 and 5/4 bounds when s > 4)."""
    wspd = compute_wspd(build_split_tree(ps), s)
    n = len(ps)
    failures = []

    radii = wspd.tree.radii
    ra = radii[wspd.node_a]
    rb = radii[wspd.node_b]
    sep_viol = wspd.min_dist < s * (2.0 * np.maximum(ra, rb))
    separation_ok = not sep_viol.any()
    if not separation_ok:
        bad = int(np.flatnonzero(sep_viol)[0])
        failures.append(f"pair {bad} violates the separation bound")

    sandwich = (wspd.min_dist <= wspd.ell) & (wspd.ell <= wspd.max_dist)
    if s > 4.0:
        sandwich &= wspd.max_dist <= 1.5 * wspd.min_dist
        sandwich &= wspd.ell <= 1.25 * wspd.min_dist
    sandwich_ok = bool(sandwich.all())
    if not sandwich_ok:
        bad = int(np.flatnonzero(~sandwich)[0])
        failures.append(f"pair {bad} violates the metric sandwich")

    coverage_checked = n <= coverage_cap
    coverage_ok = None
    if coverage_checked:
        counts = np.zeros(n * (n - 1) // 2, dtype=np.int64)
        nodes = wspd.tree.nodes
        for i in range(wspd.pair_count):
            ai = nodes[wspd.node_a[i]].point_indices.astype(np.int64)
            bi = nodes[wspd.node_b[i]].point_indices.astype(np.int64)
            u = np.minimum.outer(ai, bi).ravel()
            v = np.maximum.outer(ai, bi).ravel()
            code = u * n - u * (u + 1) // 2 + (v - u - 1)
            np.add.at(counts, code, 1)
        coverage_ok = bool((counts == 1).all())
        if not coverage_ok:
            bad = int(np.flatnonzero(counts != 1)[0])
            failures.append(f"point-pair code {bad} covered {counts[bad]} times")

    return WspdAuditReport(
        pair_count=wspd.pair_count,
        coverage_checked=coverage_checked,
        coverage_ok=coverage_ok,
        separation_ok=separation_ok,
        sandwich_ok=sandwich_ok,
        failures=failures,
    )


@dataclass
class OneEdgePerPairReport:
    ok: bool
    assignments: dict
    failures: list = field(default_factory=list)


def audit_one_edge_per_pair(edges, wspd: Wspd) -> OneEdgePerPairReport:
    """Map every edge to its unique covering pair and check injectivity.

    `edges` may be a SpannerGraph or an iterable of (u, v) / (u, v, w).
    An edge covered by zero pairs raises: that is a coverage bug, not a
    greedy property violation.
    """
    if isinstance(edges, SpannerGraph):
        edge_list = [(u, v) for u, v, _ in edges.edges()]
    else:
        edge_list = [(e[0], e[1]) for e in edges]
    lookup = _PairLookup(wspd)
    assignments = {}
    owners: dict[int, tuple] = {}
    failures = []
    for u, v in edge_list:
        i = find_covering_pair(wspd, u, v, _lookup=lookup)
        assignments[(u, v)] = i
        if i in owners:
            failures.append(f"pair {i} covers both edge {owners[i]} and edge {(u, v)}")
        else:
            owners[i] = (u, v)
    return OneEdgePerPairReport(ok=not failures, assignments=assignments, failures=failures)
