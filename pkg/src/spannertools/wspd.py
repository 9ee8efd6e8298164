"""Fair split tree and well-separated pair decomposition.

The split tree keeps an explicit point list per node (a zero-copy view into
one global permutation), which trades a little memory for much faster access
to the members of a node.  Pair metrics (min, max, diam, ell) are derived
from the circles circumscribing the node bounding boxes and are cached at
emission time in flat arrays, so a decomposition with tens of millions of
pairs stays compact.
"""

from __future__ import annotations

import math
from array import array
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import PointSet

__all__ = [
    "SplitTreeNode",
    "SplitTree",
    "WspdPair",
    "Wspd",
    "build_split_tree",
    "compute_wspd",
    "pairs_sorted_by_min",
    "find_covering_pair",
]


@dataclass(eq=False)
class SplitTreeNode:
    """A split-tree node over the points perm[start:end]."""

    index: int
    start: int
    end: int
    point_indices: np.ndarray
    bbox_min: np.ndarray
    bbox_max: np.ndarray
    circle_center: tuple
    circle_radius: float
    children: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __len__(self) -> int:
        return self.end - self.start

    def __repr__(self):
        kind = "leaf" if self.is_leaf else "node"
        return f"SplitTreeNode({kind}, index={self.index}, size={len(self)})"


class SplitTree:
    """Fair split tree: recursive halving of the longest bounding-box side."""

    __slots__ = ("root", "nodes", "perm", "pos", "centers", "radii", "dimension")

    def __init__(self, root, nodes, perm, pos, centers, radii, dimension):
        self.root = root
        self.nodes = nodes
        self.perm = perm
        self.pos = pos
        self.centers = centers
        self.radii = radii
        self.dimension = dimension

    def depth(self) -> int:
        best = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            if d > best:
                best = d
            for c in node.children:
                stack.append((c, d + 1))
        return best

    def __repr__(self):
        return f"SplitTree(n={len(self.perm)}, nodes={len(self.nodes)})"


def build_split_tree(ps: PointSet) -> SplitTree:
    """Build the fair split tree of a point set.

    Each internal node is split by the hyperplane through the midpoint of
    the longest side of its bounding box; points exactly on the plane go to
    the lower child.  Construction is deterministic for a given input order.
    """
    coords = ps.coords
    n, d = coords.shape
    perm = np.arange(n, dtype=np.int32)
    nodes: list[SplitTreeNode] = []

    def new_node(start, end):
        idx = perm[start:end]
        sub = coords[idx]
        lo = sub.min(axis=0)
        hi = sub.max(axis=0)
        lo_l = lo.tolist()
        hi_l = hi.tolist()
        center = tuple((lo_l[k] + hi_l[k]) * 0.5 for k in range(d))
        diag2 = 0.0
        for k in range(d):
            side = hi_l[k] - lo_l[k]
            diag2 += side * side
        node = SplitTreeNode(
            index=len(nodes),
            start=start,
            end=end,
            point_indices=idx,
            bbox_min=lo,
            bbox_max=hi,
            circle_center=center,
            circle_radius=0.5 * math.sqrt(diag2),
        )
        nodes.append(node)
        return node

    root = new_node(0, n)
    stack = [root] if n > 1 else []
    while stack:
        node = stack.pop()
        idx = perm[node.start:node.end]
        extent = node.bbox_max - node.bbox_min
        axis = int(np.argmax(extent))
        mid = (node.bbox_min[axis] + node.bbox_max[axis]) * 0.5
        vals = coords[idx, axis]
        mask = vals <= mid
        nl = int(mask.sum())
        if nl == len(idx):
            # Rounding put the midpoint onto the maximum; fall back to
            # splitting off the points at the axis minimum.
            mask = vals <= node.bbox_min[axis]
            nl = int(mask.sum())
        perm[node.start:node.end] = np.concatenate((idx[mask], idx[~mask]))
        lo_child = new_node(node.start, node.start + nl)
        hi_child = new_node(node.start + nl, node.end)
        node.children = (lo_child, hi_child)
        if len(lo_child) > 1:
            stack.append(lo_child)
        if len(hi_child) > 1:
            stack.append(hi_child)

    pos = np.empty(n, dtype=np.int32)
    pos[perm] = np.arange(n, dtype=np.int32)
    centers = np.array([node.circle_center for node in nodes], dtype=np.float64)
    radii = np.array([node.circle_radius for node in nodes], dtype=np.float64)
    return SplitTree(root, nodes, perm, pos, centers, radii, d)


def _center_dist(ca, cb) -> float:
    acc = 0.0
    for a, b in zip(ca, cb):
        diff = a - b
        acc += diff * diff
    return math.sqrt(acc)


def circle_gap(ca, ra, cb, rb) -> float:
    """Shortest distance between two circles (0 if they overlap)."""
    g = _center_dist(ca, cb) - ra - rb
    return g if g > 0.0 else 0.0


@dataclass(frozen=True)
class WspdPair:
    """One well-separated pair with its cached circle metrics."""

    node_a: SplitTreeNode
    node_b: SplitTreeNode
    min_dist: float
    max_dist: float
    diam_a: float
    diam_b: float
    ell: float


class _PairsView(Sequence):
    def __init__(self, wspd):
        self._wspd = wspd

    def __len__(self):
        return self._wspd.pair_count

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self._wspd.pair(j) for j in range(*i.indices(len(self)))]
        return self._wspd.pair(i)


class Wspd:
    """A well-separated pair decomposition over a split tree.

    Pair metrics live in flat arrays indexed 0..m-1; `pair(i)` materializes
    a `WspdPair` view on demand.
    """

    __slots__ = ("separation", "tree", "node_a", "node_b", "min_dist", "max_dist", "ell")

    def __init__(self, separation, tree, node_a, node_b, min_dist, max_dist, ell):
        self.separation = separation
        self.tree = tree
        self.node_a = node_a
        self.node_b = node_b
        self.min_dist = min_dist
        self.max_dist = max_dist
        self.ell = ell

    @property
    def pair_count(self) -> int:
        return len(self.min_dist)

    @property
    def pairs(self) -> Sequence:
        return _PairsView(self)

    def pair(self, i: int) -> WspdPair:
        na = self.tree.nodes[self.node_a[i]]
        nb = self.tree.nodes[self.node_b[i]]
        return WspdPair(
            node_a=na,
            node_b=nb,
            min_dist=float(self.min_dist[i]),
            max_dist=float(self.max_dist[i]),
            diam_a=2.0 * na.circle_radius,
            diam_b=2.0 * nb.circle_radius,
            ell=float(self.ell[i]),
        )

    def __repr__(self):
        return f"Wspd(s={self.separation}, m={self.pair_count})"


def compute_wspd(tree: SplitTree, s: float) -> Wspd:
    """Compute the s-well-separated pair decomposition of a split tree.

    Standard recursion: a candidate (A, B) is emitted once the gap between
    the node circles is at least s times the larger circle diameter,
    otherwise the node with the larger circle is split.  Every unordered
    pair of distinct points ends up in exactly one emitted pair.
    """
    if not s > 0.0:
        raise ValueError("separation must be positive")
    ids_a = array("i")
    ids_b = array("i")
    min_d = array("d")
    max_d = array("d")
    ell_d = array("d")

    work = []
    for node in tree.nodes:
        if node.children:
            work.append(node.children)
    while work:
        a, b = work.pop()
        ra = a.circle_radius
        rb = b.circle_radius
        ell = _center_dist(a.circle_center, b.circle_center)
        gap = ell - ra - rb
        if gap < 0.0:
            gap = 0.0
        big = ra if ra >= rb else rb
        if gap >= s * (2.0 * big):
            ids_a.append(a.index)
            ids_b.append(b.index)
            min_d.append(gap)
            max_d.append(ell + ra + rb)
            ell_d.append(ell)
        elif ra >= rb:
            work.append((a.children[0], b))
            work.append((a.children[1], b))
        else:
            work.append((a, b.children[0]))
            work.append((a, b.children[1]))

    return Wspd(
        separation=float(s),
        tree=tree,
        node_a=np.frombuffer(ids_a, dtype=np.int32).copy(),
        node_b=np.frombuffer(ids_b, dtype=np.int32).copy(),
        min_dist=np.frombuffer(min_d, dtype=np.float64).copy(),
        max_dist=np.frombuffer(max_d, dtype=np.float64).copy(),
        ell=np.frombuffer(ell_d, dtype=np.float64).copy(),
    )


def pairs_sorted_by_min(wspd: Wspd) -> np.ndarray:
    """Pair indices ordered by nondecreasing min distance, ties by index."""
    return np.argsort(wspd.min_dist, kind="stable")


class _PairLookup:
    """Sorted-key index over (node_a, node_b) -> pair id."""

    def __init__(self, wspd):
        width = len(wspd.tree.nodes)
        keys = wspd.node_a.astype(np.int64) * width + wspd.node_b.astype(np.int64)
        order = np.argsort(keys, kind="stable")
        self._width = width
        self._keys = keys[order]
        self._order = order

    def get(self, a_id, b_id):
        key = a_id * self._width + b_id
        j = int(np.searchsorted(self._keys, key))
        if j < len(self._keys) and self._keys[j] == key:
            return int(self._order[j])
        return None


def find_covering_pair(wspd: Wspd, u: int, v: int, _lookup=None) -> int:
    """Index of the unique well-separated pair containing the point pair (u, v).

    Mirrors the emission recursion, steered toward the children containing
    u and v, so the walk costs O(tree depth).  Raises if the decomposition
    fails to cover (u, v) -- that would be a coverage bug.
    """
    if u == v:
        raise ValueError("a pair needs two distinct points")
    tree = wspd.tree
    pos = tree.pos
    pu = int(pos[u])
    pv = int(pos[v])
    lookup = _lookup if _lookup is not None else _PairLookup(wspd)

    node = tree.root
    while True:
        if node.is_leaf:
            raise RuntimeError(f"points {u} and {v} were never separated by the tree")
        c0, c1 = node.children
        u_in_0 = c0.start <= pu < c0.end
        v_in_0 = c0.start <= pv < c0.end
        if u_in_0 and v_in_0:
            node = c0
        elif not u_in_0 and not v_in_0:
            node = c1
        else:
            break
    a, b = node.children
    # pa/pb: the permutation slot of whichever of u, v sits on each side.
    pa, pb = (pu, pv) if a.start <= pu < a.end else (pv, pu)

    while True:
        pair_id = lookup.get(a.index, b.index)
        if pair_id is not None:
            return pair_id
        if a.circle_radius >= b.circle_radius:
            if a.is_leaf:
                raise RuntimeError(f"no well-separated pair covers ({u}, {v})")
            a = a.children[0] if a.children[0].start <= pa < a.children[0].end else a.children[1]
        else:
            if b.is_leaf:
                raise RuntimeError(f"no well-separated pair covers ({u}, {v})")
            b = b.children[0] if b.children[0].start <= pb < b.children[0].end else b.children[1]
