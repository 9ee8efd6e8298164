"""Linear-space greedy spanner construction.

The builder walks the well-separated pairs in order of their minimum
distance, keeps one candidate edge per pair in an indexed priority queue,
and repeatedly extracts the shortest candidate.  Each extraction adds a
greedy edge and triggers closest-pair recomputation for the queued pairs
whose candidates the new edge could affect.  Live state is one queue entry
plus a small cache per pair, so memory stays linear in the decomposition
size instead of quadratic in the number of points.

Toggleable accelerations (all preserve the output edge set exactly):
  * goal-directed A* instead of plain Dijkstra for the closest-pair searches,
  * skipping sources whose targets are already covered by a saved path,
  * a sharpened circle-distance test for which queued pairs to recompute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fastpath
from .core import (
    PointSet,
    SpannerGraph,
    _astar_fill,
    _astar_to_target,
    _dijkstra_fill,
    _dijkstra_to_target,
)
from .wspd import Wspd, build_split_tree, compute_wspd, pairs_sorted_by_min

__all__ = [
    "PRUNE_BASIC",
    "PRUNE_SHARPENED",
    "GreedyConfig",
    "CandidateEntry",
    "PairRuntimeState",
    "BuildReport",
    "PairQueue",
    "GreedySpannerBuilder",
    "greedy_spanner_build",
]

_INF = math.inf

PRUNE_BASIC = "basic"
PRUNE_SHARPENED = "sharpened"


@dataclass
class GreedyConfig:
    """Stretch factor plus the optimization toggles."""

    t: float
    use_astar: bool = True
    use_saved_path_skip: bool = True
    prune_rule: str = PRUNE_SHARPENED
    record_counters: bool = True

    def __post_init__(self):
        if not self.t > 1.0:
            raise ValueError(f"stretch factor must exceed 1, got {self.t}")
        if self.prune_rule not in (PRUNE_BASIC, PRUNE_SHARPENED):
            raise ValueError(f"unknown prune rule: {self.prune_rule!r}")

    @property
    def separation(self) -> float:
        return 2.0 * self.t / (self.t - 1.0)


@dataclass(slots=True)
class CandidateEntry:
    """A pair's current candidate edge: the closest (u, v) still lacking a t-path."""

    pair_index: int
    u: int
    v: int
    key: float
    priority: tuple = field(init=False)

    def __post_init__(self):
        # Global tie order: key, then the point pair lexicographically.
        self.priority = (self.key, self.u, self.v)


@dataclass(frozen=True)
class PairRuntimeState:
    """Read-only snapshot of one pair's cached build state."""

    saved_path: tuple | None  # (source, target, dist) upper bound, only shrinks
    covered_sources: frozenset
    exhausted: bool


@dataclass
class BuildReport:
    """Insertion-ordered edge log plus instrumentation counters."""

    edges_in_order: list = field(default_factory=list)
    closest_pair_calls: int = 0
    sssp_runs: int = 0
    skipped_by_coverage: int = 0
    pairs_pruned_by_distance: int = 0
    peak_queue_size: int = 0
    pair_count: int = 0
    covered_sources_total: int = 0
    saved_paths_count: int = 0


class PairQueue:
    """Handle-indexed binary min-heap of candidate entries, one per pair.

    Keys only ever increase over a pair's lifetime; `increase_key` asserts
    this instead of clamping.
    """

    __slots__ = ("_heap", "_pos")

    def __init__(self):
        self._heap: list[CandidateEntry] = []
        self._pos: dict[int, int] = {}

    def __len__(self):
        return len(self._heap)

    def __contains__(self, pair_index):
        return pair_index in self._pos

    @property
    def min_key(self) -> float:
        return self._heap[0].key

    def entry(self, pair_index) -> CandidateEntry:
        return self._heap[self._pos[pair_index]]

    def live_pair_ids(self):
        return self._pos.keys()

    def insert(self, entry: CandidateEntry):
        if entry.pair_index in self._pos:
            raise ValueError(f"pair {entry.pair_index} already queued")
        self._heap.append(entry)
        self._pos[entry.pair_index] = len(self._heap) - 1
        self._sift_up(len(self._heap) - 1)

    def extract_min(self) -> CandidateEntry:
        if not self._heap:
            raise IndexError("extract from an empty queue")
        top = self._heap[0]
        last = self._heap.pop()
        del self._pos[top.pair_index]
        if self._heap:
            self._heap[0] = last
            self._pos[last.pair_index] = 0
            self._sift_down(0)
        return top

    def remove(self, pair_index):
        i = self._pos.pop(pair_index)
        last = self._heap.pop()
        if i < len(self._heap):
            self._heap[i] = last
            self._pos[last.pair_index] = i
            self._sift_up(i)
            self._sift_down(i)

    def increase_key(self, entry: CandidateEntry):
        i = self._pos[entry.pair_index]
        assert entry.priority >= self._heap[i].priority, (
            f"key of pair {entry.pair_index} decreased: "
            f"{self._heap[i].priority} -> {entry.priority}"
        )
        self._heap[i] = entry
        self._sift_down(i)

    def _sift_up(self, i):
        heap, pos = self._heap, self._pos
        item = heap[i]
        while i > 0:
            parent = (i - 1) >> 1
            if item.priority < heap[parent].priority:
                heap[i] = heap[parent]
                pos[heap[i].pair_index] = i
                i = parent
            else:
                break
        heap[i] = item
        pos[item.pair_index] = i

    def _sift_down(self, i):
        heap, pos = self._heap, self._pos
        size = len(heap)
        item = heap[i]
        while True:
            child = 2 * i + 1
            if child >= size:
                break
            right = child + 1
            if right < size and heap[right].priority < heap[child].priority:
                child = right
            if heap[child].priority < item.priority:
                heap[i] = heap[child]
                pos[heap[i].pair_index] = i
                i = child
            else:
                break
        heap[i] = item
        pos[item.pair_index] = i


class GreedySpannerBuilder:
    """Stateful driver for one greedy spanner construction.

    Exposed pieces (`fill_queue`, `closest_pair`, `affected_pairs`, `queue`)
    can be driven individually, which the test suite uses to compare each
    stage against brute-force oracles.  `trace`, when given a list, records
    ("treat", i) and ("extract", i, u, v) events.
    """

    def __init__(self, ps: PointSet, cfg: GreedyConfig, wspd: Wspd | None = None, trace=None):
        if not isinstance(cfg, GreedyConfig):
            raise TypeError("cfg must be a GreedyConfig")
        self.ps = ps
        self.cfg = cfg
        if wspd is None:
            wspd = compute_wspd(build_split_tree(ps), cfg.separation)
        elif wspd.separation != cfg.separation:
            raise ValueError(
                f"decomposition separation {wspd.separation} does not match "
                f"2t/(t-1) = {cfg.separation}"
            )
        self.wspd = wspd
        self.order = pairs_sorted_by_min(wspd)
        self.graph = SpannerGraph(len(ps))
        self.queue = PairQueue()
        self.cursor = 0
        self.trace = trace

        m = wspd.pair_count
        self.exhausted = np.zeros(m, dtype=bool)
        self._saved_src = np.full(m, -1, dtype=np.int32)
        self._saved_dst = np.full(m, -1, dtype=np.int32)
        self._saved_len = np.full(m, _INF)
        self.covered: dict[int, set[int]] = {}

        self._coords = ps.coords
        self._pts = ps.as_tuples()
        self._dist_buf = np.full(len(ps), _INF)
        self._fast = _fastpath.HAVE_FASTPATH
        if self._fast:
            n = len(ps)
            self._touched_buf = np.empty(n, dtype=np.int64)
            self._adj_nbr = np.empty((n, 8), dtype=np.int32)
            self._adj_wts = np.empty((n, 8), dtype=np.float64)
            self._adj_deg = np.zeros(n, dtype=np.int32)
            self._target_mark = np.zeros(n, dtype=np.int64)
            self._done_mark = np.zeros(n, dtype=np.int64)
            self._h_buf = np.empty(n, dtype=np.float64)
            self._tk_buf = np.empty(n, dtype=np.float64)
            self._tb_buf = np.empty(n, dtype=np.int64)
            cap = max(1024, 2 * n)
            self._hk_buf = np.empty(cap, dtype=np.float64)
            self._hv_buf = np.empty(cap, dtype=np.int64)
            self._mark_counter = 0
            self._search_counter = 0
        self._nodes = wspd.tree.nodes
        self._centers = wspd.tree.centers
        self._radii = wspd.tree.radii
        self._min_dist = wspd.min_dist
        self._max_dist = wspd.max_dist
        self._ell = wspd.ell
        self._node_a = wspd.node_a
        self._node_b = wspd.node_b
        self.report = BuildReport(pair_count=m)
        self._done = False

    # -- public stages ------------------------------------------------------

    def run(self):
        if self._done:
            raise RuntimeError("builder already ran; make a new one")
        self._done = True
        self.fill_queue()
        queue = self.queue
        graph = self.graph
        edges = self.report.edges_in_order
        while len(queue):
            entry = queue.extract_min()
            i, u, v, w = entry.pair_index, entry.u, entry.v, entry.key
            if self.trace is not None:
                self.trace.append(("extract", i, u, v))
            self.exhausted[i] = True
            graph.add_edge(u, v, w)
            if self._fast:
                self._mirror_edge(u, v, w)
            edges.append((u, v, w))
            for j in self.affected_pairs(u, v, i):
                j = int(j)
                res = self.closest_pair(j)
                if res is None:
                    queue.remove(j)
                    self.exhausted[j] = True
                else:
                    cur = queue.entry(j)
                    if res != (cur.u, cur.v):
                        nu, nv = res
                        queue.increase_key(
                            CandidateEntry(j, nu, nv, self._edge_len(nu, nv))
                        )
            self.fill_queue()
        self.report.covered_sources_total = sum(len(s) for s in self.covered.values())
        self.report.saved_paths_count = int((self._saved_len < _INF).sum())
        return graph, self.report

    def fill_queue(self):
        """Treat untreated pairs, in min-distance order, while the guard holds.

        A pair is treated at most once: its closest pair is computed and, if
        one exists, enqueued.  Treatment stops as soon as the next pair's
        minimum distance exceeds the current queue minimum, because such a
        pair cannot supply the next greedy edge yet.
        """
        order = self.order
        md = self._min_dist
        queue = self.queue
        m = len(order)
        while self.cursor < m:
            i = int(order[self.cursor])
            if len(queue) and md[i] > queue.min_key:
                break
            self.cursor += 1
            if self.trace is not None:
                self.trace.append(("treat", i))
            res = self.closest_pair(i)
            if res is None:
                self.exhausted[i] = True
            else:
                u, v = res
                queue.insert(CandidateEntry(i, u, v, self._edge_len(u, v)))
                if len(queue) > self.report.peak_queue_size:
                    self.report.peak_queue_size = len(queue)

    def closest_pair(self, i: int):
        """Closest (u, v) across pair i still lacking a t-path, or None.

        Runs one bounded search per uncovered source on the smaller side;
        any target unreached within t * max_dist(i) has graph distance above
        t * |uv| for every member pair, so it is a valid candidate at its
        Euclidean distance.  Ties are broken by the point pair, lexicographic.
        """
        if self.exhausted[i]:
            return None
        cfg = self.cfg
        count = cfg.record_counters
        if count:
            self.report.closest_pair_calls += 1
        na = self._nodes[self._node_a[i]]
        nb = self._nodes[self._node_b[i]]
        if na.end - na.start <= nb.end - nb.start:
            S, T = na, nb
        else:
            S, T = nb, na
        t = cfg.t
        if T.end - T.start == 1:
            return self._closest_pair_singleton(i, S, T)

        pts = self._pts
        bound = t * float(self._max_dist[i])
        T_idx = T.point_indices
        c = T.circle_center
        r = T.circle_radius
        cov = self.covered.get(i)
        use_skip = cfg.use_saved_path_skip
        use_astar = cfg.use_astar
        dist_buf = self._dist_buf
        best_prio = None
        best_uv = None

        if self._fast:
            c_row = self._centers[T.index]
            self._mark_counter += 1
            mark_val = self._mark_counter
            self._target_mark[T_idx] = mark_val
            saved_len = self._saved_len
            for a in S.point_indices.tolist():
                if cov is not None and a in cov:
                    continue
                if use_skip and saved_len[i] < _INF:
                    if self._saved_covers(i, a, c, r):
                        if cov is None:
                            cov = self.covered.setdefault(i, set())
                        cov.add(a)
                        if count:
                            self.report.skipped_by_coverage += 1
                        continue
                if count:
                    self.report.sssp_runs += 1
                self._search_counter += 1
                bk, bb, rd, rb, self._hk_buf, self._hv_buf = _fastpath.closest_from_source(
                    self._adj_nbr, self._adj_wts, self._adj_deg, self._coords,
                    a, T_idx, self._target_mark, mark_val,
                    self._done_mark, self._search_counter,
                    t, bound, use_astar, c_row, r,
                    self._h_buf, dist_buf, self._touched_buf,
                    self._tk_buf, self._tb_buf, self._hk_buf, self._hv_buf,
                )
                if bk < _INF:
                    b = int(bb)
                    uu, vv = (a, b) if a < b else (b, a)
                    prio = (bk, uu, vv)
                    if best_prio is None or prio < best_prio:
                        best_prio = prio
                        best_uv = (uu, vv)
                if rd < saved_len[i]:
                    self._saved_src[i] = a
                    self._saved_dst[i] = int(rb)
                    saved_len[i] = rd
            return best_uv

        T_pts = self._coords[T_idx]
        for a_raw in S.point_indices:
            a = int(a_raw)
            if cov is not None and a in cov:
                continue
            if use_skip and self._saved_len[i] < _INF:
                if self._saved_covers(i, a, c, r):
                    if cov is None:
                        cov = self.covered.setdefault(i, set())
                    cov.add(a)
                    if count:
                        self.report.skipped_by_coverage += 1
                    continue
            if count:
                self.report.sssp_runs += 1
            if use_astar:
                touched = _astar_fill(self.graph.adjacency, pts, a, c, r, bound, dist_buf)
            else:
                touched = _dijkstra_fill(self.graph.adjacency, a, bound, dist_buf)

            dT = dist_buf[T_idx]
            diff = T_pts - self._coords[a]
            ab = np.sqrt((diff * diff).sum(axis=1))
            cand = dT > t * ab
            if cand.any():
                kmin = float(ab[cand].min())
                hits = np.flatnonzero(cand & (ab == kmin))
                for h in hits:
                    b = int(T_idx[h])
                    uu, vv = (a, b) if a < b else (b, a)
                    prio = (kmin, uu, vv)
                    if best_prio is None or prio < best_prio:
                        best_prio = prio
                        best_uv = (uu, vv)
            dmin = float(dT.min())
            if dmin < self._saved_len[i]:
                hits = np.flatnonzero(dT == dmin)
                self._saved_src[i] = a
                self._saved_dst[i] = int(T_idx[hits].min())
                self._saved_len[i] = dmin
            dist_buf[touched] = _INF

        return best_uv

    def affected_pairs(self, u: int, v: int, pair_index: int) -> np.ndarray:
        """Queued pairs whose candidate the new edge (u, v) could change.

        A linear scan over the live queue entries; the basic rule keeps a
        pair when either of its node circles lies within t|uv| of an edge
        endpoint, the sharpened rule compares the best possible detour
        through the new edge against the pair's own scale.
        """
        queue = self.queue
        live = np.fromiter(queue.live_pair_ids(), dtype=np.int64, count=len(queue))
        if not len(live):
            return live
        t = self.cfg.t
        centers = self._centers
        radii = self._radii
        na = self._node_a[live]
        nb = self._node_b[live]
        ca, ra = centers[na], radii[na]
        cb, rb = centers[nb], radii[nb]

        if self.cfg.prune_rule == PRUNE_BASIC:
            limit = t * self._edge_len(u, v)
            pu = self._coords[u]
            pv = self._coords[v]
            keep = np.zeros(len(live), dtype=bool)
            for cc, rr in ((ca, ra), (cb, rb)):
                for pp in (pu, pv):
                    diff = cc - pp
                    gap = np.sqrt((diff * diff).sum(axis=1)) - rr
                    keep |= gap <= limit
        else:
            i = pair_index
            cai = centers[self._node_a[i]]
            rai = radii[self._node_a[i]]
            cbi = centers[self._node_b[i]]
            rbi = radii[self._node_b[i]]
            ell = float(self._ell[i])

            def gap(cc, rr, cfixed, rfixed):
                diff = cc - cfixed
                g = np.sqrt((diff * diff).sum(axis=1)) - rr - rfixed
                return np.maximum(g, 0.0)

            scale = t * self._max_dist[live]
            lhs1 = gap(ca, ra, cai, rai) + ell + gap(cb, rb, cbi, rbi)
            lhs2 = gap(cb, rb, cai, rai) + ell + gap(ca, ra, cbi, rbi)
            keep = (lhs1 <= scale) | (lhs2 <= scale)

        if self.cfg.record_counters:
            self.report.pairs_pruned_by_distance += int(len(live) - keep.sum())
        return live[keep]

    def pair_state(self, i: int) -> PairRuntimeState:
        saved = None
        if self._saved_len[i] < _INF:
            saved = (int(self._saved_src[i]), int(self._saved_dst[i]), float(self._saved_len[i]))
        return PairRuntimeState(
            saved_path=saved,
            covered_sources=frozenset(self.covered.get(i, ())),
            exhausted=bool(self.exhausted[i]),
        )

    # -- internals ----------------------------------------------------------

    def _mirror_edge(self, u, v, w):
        # keep the flat adjacency used by the compiled kernels in sync
        nbr, wts, deg = self._adj_nbr, self._adj_wts, self._adj_deg
        if max(deg[u], deg[v]) >= nbr.shape[1]:
            cap = nbr.shape[1] * 2
            grown_nbr = np.empty((nbr.shape[0], cap), dtype=np.int32)
            grown_wts = np.empty((nbr.shape[0], cap), dtype=np.float64)
            grown_nbr[:, : nbr.shape[1]] = nbr
            grown_wts[:, : nbr.shape[1]] = wts
            self._adj_nbr = nbr = grown_nbr
            self._adj_wts = wts = grown_wts
        nbr[u, deg[u]] = v
        wts[u, deg[u]] = w
        deg[u] += 1
        nbr[v, deg[v]] = u
        wts[v, deg[v]] = w
        deg[v] += 1

    def _edge_len(self, u, v):
        acc = 0.0
        for a, b in zip(self._pts[u], self._pts[v]):
            d = a - b
            acc += d * d
        return math.sqrt(acc)

    def _saved_covers(self, i, a, c, r):
        """Saved-path test: does the stored path give t-paths from `a` to all
        of the far side?  If so, `a` is irrelevant for the rest of the build."""
        t = self.cfg.t
        pts = self._pts
        pa = pts[a]
        ps = pts[int(self._saved_src[i])]
        pt = pts[int(self._saved_dst[i])]
        acc = 0.0
        for x, y in zip(pa, ps):
            d = x - y
            acc += d * d
        d_as = math.sqrt(acc)
        acc = 0.0
        for x, y in zip(pt, c):
            d = x - y
            acc += d * d
        d_tc = math.sqrt(acc)
        acc = 0.0
        for x, y in zip(pa, c):
            d = x - y
            acc += d * d
        d_ac = math.sqrt(acc)
        lhs = t * d_as + float(self._saved_len[i]) + t * (d_tc + r)
        rhs = t * (d_ac - r)
        return lhs <= rhs

    def _closest_pair_singleton(self, i, S, T):
        # Both sides are single points: one bounded point-to-point search
        # with the tight radius t|ab| decides candidacy.
        cfg = self.cfg
        a = int(S.point_indices[0])
        b = int(T.point_indices[0])
        c = T.circle_center
        r = T.circle_radius
        cov = self.covered.get(i)
        if cov is not None and a in cov:
            return None
        if cfg.use_saved_path_skip and self._saved_len[i] < _INF:
            if self._saved_covers(i, a, c, r):
                self.covered.setdefault(i, set()).add(a)
                if cfg.record_counters:
                    self.report.skipped_by_coverage += 1
                return None
        if cfg.record_counters:
            self.report.sssp_runs += 1
        limit = cfg.t * self._edge_len(a, b)
        if self._fast:
            if cfg.use_astar:
                delta = _fastpath.astar_to_target(
                    self._adj_nbr, self._adj_wts, self._adj_deg, self._coords,
                    a, b, limit, self._dist_buf, self._touched_buf,
                )
            else:
                delta = _fastpath.dijkstra_to_target(
                    self._adj_nbr, self._adj_wts, self._adj_deg,
                    a, b, limit, self._dist_buf, self._touched_buf,
                )
        elif cfg.use_astar:
            delta = _astar_to_target(self.graph.adjacency, self._pts, a, b, limit)
        else:
            delta = _dijkstra_to_target(self.graph.adjacency, a, b, limit)
        if delta == _INF:
            return (a, b) if a < b else (b, a)
        if delta < self._saved_len[i]:
            self._saved_src[i] = a
            self._saved_dst[i] = b
            self._saved_len[i] = delta
        return None


def _dist(p, q):
    acc = 0.0
    for a, b in zip(p, q):
        d = a - b
        acc += d * d
    return math.sqrt(acc)


def greedy_spanner_build(ps: PointSet, cfg: GreedyConfig, wspd: Wspd | None = None):
    """Build the greedy t-spanner of a point set in linear live space.

    Returns (graph, report).  The edge set is exactly what the quadratic
    textbook greedy procedure produces under the same tie order, which
    `baselines.greedy_naive` implements and the test suite cross-checks.
    A precomputed `wspd` (matching 2t/(t-1)) may be passed to share work
    across configurations.
    """
    return GreedySpannerBuilder(ps, cfg, wspd=wspd).run()
