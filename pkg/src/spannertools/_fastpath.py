"""Compiled search kernels for the greedy builder's hot path.

The builder issues millions of small bounded searches; these numba kernels
run them over flat adjacency arrays.  They compute exactly the same
distance fixed points as the pure-Python engines in `core` (same IEEE
arithmetic, same pruning rules), so which engine runs is invisible in the
output -- the test suite checks that.  If numba is unavailable, or
SPANNER_NO_NUMBA is set, the builder falls back to the Python engines.
"""

from __future__ import annotations

import math
import os

import numpy as np

HAVE_FASTPATH = False

if not os.environ.get("SPANNER_NO_NUMBA"):
    try:
        from numba import njit

        HAVE_FASTPATH = True
    except ImportError:  # pragma: no cover - environment without numba
        pass

if HAVE_FASTPATH:
    _INF = math.inf
    _H_SLACK = 1e-12

    @njit(cache=True)
    def _heap_push(hk, hv, size, key, v):
        if size == hk.shape[0]:
            nk = np.empty(size * 2, np.float64)
            nv = np.empty(size * 2, np.int64)
            nk[:size] = hk
            nv[:size] = hv
            hk, hv = nk, nv
        i = size
        hk[i] = key
        hv[i] = v
        while i > 0:
            parent = (i - 1) >> 1
            if hk[i] < hk[parent]:
                hk[i], hk[parent] = hk[parent], hk[i]
                hv[i], hv[parent] = hv[parent], hv[i]
                i = parent
            else:
                break
        return hk, hv, size + 1

    @njit(cache=True)
    def _heap_pop(hk, hv, size):
        key = hk[0]
        v = hv[0]
        size -= 1
        if size > 0:
            lk = hk[size]
            lv = hv[size]
            i = 0
            while True:
                child = 2 * i + 1
                if child >= size:
                    break
                right = child + 1
                if right < size and hk[right] < hk[child]:
                    child = right
                if hk[child] < lk:
                    hk[i] = hk[child]
                    hv[i] = hv[child]
                    i = child
                else:
                    break
            hk[i] = lk
            hv[i] = lv
        return key, v, size

    @njit(cache=True)
    def dijkstra_fill(nbr, wts, deg, source, bound, dist, touched):
        """Bounded Dijkstra writing exact distances into `dist`.

        Returns the number of touched vertices; `touched[:count]` lists them
        so the caller can reset `dist` in O(count).
        """
        hk = np.empty(64, np.float64)
        hv = np.empty(64, np.int64)
        size = 0
        dist[source] = 0.0
        touched[0] = source
        count = 1
        hk, hv, size = _heap_push(hk, hv, size, 0.0, source)
        while size > 0:
            d, v, size = _heap_pop(hk, hv, size)
            if d > bound:
                break
            if d > dist[v]:
                continue
            for j in range(deg[v]):
                w = nbr[v, j]
                nd = d + wts[v, j]
                if nd <= bound and nd < dist[w]:
                    if dist[w] == _INF:
                        touched[count] = w
                        count += 1
                    dist[w] = nd
                    hk, hv, size = _heap_push(hk, hv, size, nd, w)
        return count

    @njit(cache=True)
    def astar_fill(nbr, wts, deg, coords, source, center, radius, bound, dist, touched):
        """Goal-directed bounded search toward a disk; exact inside the disk."""
        d_dim = coords.shape[1]
        hk = np.empty(64, np.float64)
        hg = np.empty(64, np.float64)
        hv = np.empty(64, np.int64)
        size = 0

        acc = 0.0
        for k in range(d_dim):
            diff = coords[source, k] - center[k]
            acc += diff * diff
        dd = math.sqrt(acc)
        h0 = dd - radius
        h0 -= _H_SLACK * (dd + radius)
        if h0 < 0.0:
            h0 = 0.0

        dist[source] = 0.0
        touched[0] = source
        count = 1
        # parallel (key, g, v) heap; grow all three together
        hk[0] = h0
        hg[0] = 0.0
        hv[0] = source
        size = 1
        while size > 0:
            # pop min by key
            f = hk[0]
            g = hg[0]
            v = hv[0]
            size -= 1
            if size > 0:
                lk = hk[size]
                lg = hg[size]
                lv = hv[size]
                i = 0
                while True:
                    child = 2 * i + 1
                    if child >= size:
                        break
                    right = child + 1
                    if right < size and hk[right] < hk[child]:
                        child = right
                    if hk[child] < lk:
                        hk[i] = hk[child]
                        hg[i] = hg[child]
                        hv[i] = hv[child]
                        i = child
                    else:
                        break
                hk[i] = lk
                hg[i] = lg
                hv[i] = lv
            if f > bound:
                break
            if g > dist[v]:
                continue
            for j in range(deg[v]):
                w = nbr[v, j]
                ng = g + wts[v, j]
                if ng <= bound and ng < dist[w]:
                    if dist[w] == _INF:
                        touched[count] = w
                        count += 1
                    dist[w] = ng
                    acc = 0.0
                    for k in range(d_dim):
                        diff = coords[w, k] - center[k]
                        acc += diff * diff
                    dd = math.sqrt(acc)
                    h = dd - radius
                    h -= _H_SLACK * (dd + radius)
                    if h < 0.0:
                        h = 0.0
                    # push (ng + h, ng, w)
                    if size == hk.shape[0]:
                        nk = np.empty(size * 2, np.float64)
                        ng_arr = np.empty(size * 2, np.float64)
                        nv = np.empty(size * 2, np.int64)
                        nk[:size] = hk
                        ng_arr[:size] = hg
                        nv[:size] = hv
                        hk, hg, hv = nk, ng_arr, nv
                    i = size
                    hk[i] = ng + h
                    hg[i] = ng
                    hv[i] = w
                    size += 1
                    while i > 0:
                        parent = (i - 1) >> 1
                        if hk[i] < hk[parent]:
                            hk[i], hk[parent] = hk[parent], hk[i]
                            hg[i], hg[parent] = hg[parent], hg[i]
                            hv[i], hv[parent] = hv[parent], hv[i]
                            i = parent
                        else:
                            break
        return count

    @njit(cache=True)
    def closest_from_source(
        nbr, wts, deg, coords, source, targets,
        target_mark, mark_val, done_mark, search_id,
        t, bound, use_astar, center, radius,
        h_buf, dist, touched, tk, tb, hk, hv,
    ):
        """One source's share of a bichromatic closest-pair computation.

        Runs a bounded (optionally goal-directed) search from `source` and
        classifies each marked target b as "has a t-path" (settled with
        dist <= t|ab|) or "candidate" (anything else).  Terminates early
        once every target is settled, or once the frontier key exceeds
        t * |ab| of the nearest unsettled target -- at that point that
        target is provably the closest remaining candidate, because every
        unsettled vertex is at least the frontier key away.

        The heap holds (key, vertex) only; an entry is stale exactly when
        dist[v] + h_buf[v] no longer reproduces its key.  tk/tb/hk/hv are
        caller-owned scratch (targets and search heap); hk/hv may be grown,
        so the final arrays are returned alongside the results.

        Returns (best_key, best_b, reached_d, reached_b, hk, hv).
        """
        d_dim = coords.shape[1]
        nt = targets.shape[0]

        # min-heap of targets by (|ab|, index)
        for i in range(nt):
            b = targets[i]
            acc = 0.0
            for k in range(d_dim):
                diff = coords[source, k] - coords[b, k]
                acc += diff * diff
            tk[i] = math.sqrt(acc)
            tb[i] = b
        for start in range(nt // 2 - 1, -1, -1):
            i = start
            key = tk[i]
            kb = tb[i]
            while True:
                child = 2 * i + 1
                if child >= nt:
                    break
                right = child + 1
                if right < nt and (
                    tk[right] < tk[child] or (tk[right] == tk[child] and tb[right] < tb[child])
                ):
                    child = right
                if tk[child] < key or (tk[child] == key and tb[child] < kb):
                    tk[i] = tk[child]
                    tb[i] = tb[child]
                    i = child
                else:
                    break
            tk[i] = key
            tb[i] = kb
        t_size = nt
        stop_key = t * tk[0]

        best_key = _INF
        best_b = -1
        reached_d = _INF
        reached_b = -1

        dist[source] = 0.0
        touched[0] = source
        count = 1
        if use_astar:
            acc = 0.0
            for k in range(d_dim):
                diff = coords[source, k] - center[k]
                acc += diff * diff
            dd = math.sqrt(acc)
            h0 = dd - radius
            h0 -= _H_SLACK * (dd + radius)
            if h0 < 0.0:
                h0 = 0.0
        else:
            h0 = 0.0
        h_buf[source] = h0
        hk[0] = h0
        hv[0] = source
        size = 1

        while size > 0:
            f = hk[0]
            v = hv[0]
            size -= 1
            if size > 0:
                lk = hk[size]
                lv = hv[size]
                i = 0
                while True:
                    child = 2 * i + 1
                    if child >= size:
                        break
                    right = child + 1
                    if right < size and hk[right] < hk[child]:
                        child = right
                    if hk[child] < lk:
                        hk[i] = hk[child]
                        hv[i] = hv[child]
                        i = child
                    else:
                        break
                hk[i] = lk
                hv[i] = lv

            if f > bound or f > stop_key:
                break
            g = dist[v]
            if g + h_buf[v] != f:
                continue  # superseded by a better push
            if target_mark[v] == mark_val and done_mark[v] != search_id:
                done_mark[v] = search_id
                acc = 0.0
                for k in range(d_dim):
                    diff = coords[source, k] - coords[v, k]
                    acc += diff * diff
                dab = math.sqrt(acc)
                if g > t * dab:
                    if dab < best_key or (dab == best_key and v < best_b):
                        best_key = dab
                        best_b = v
                else:
                    if g < reached_d or (g == reached_d and v < reached_b):
                        reached_d = g
                        reached_b = v
                # drop settled targets off the target heap, refresh the stop key
                while t_size > 0 and done_mark[tb[0]] == search_id:
                    t_size -= 1
                    if t_size > 0:
                        key = tk[t_size]
                        kb = tb[t_size]
                        i = 0
                        while True:
                            child = 2 * i + 1
                            if child >= t_size:
                                break
                            right = child + 1
                            if right < t_size and (
                                tk[right] < tk[child]
                                or (tk[right] == tk[child] and tb[right] < tb[child])
                            ):
                                child = right
                            if tk[child] < key or (tk[child] == key and tb[child] < kb):
                                tk[i] = tk[child]
                                tb[i] = tb[child]
                                i = child
                            else:
                                break
                        tk[i] = key
                        tb[i] = kb
                if t_size == 0:
                    break  # every target settled; tracked candidates are complete
                stop_key = t * tk[0]
            for j in range(deg[v]):
                w = nbr[v, j]
                ng = g + wts[v, j]
                if ng <= bound and ng < dist[w]:
                    if dist[w] == _INF:
                        touched[count] = w
                        count += 1
                        if use_astar:
                            acc = 0.0
                            for k in range(d_dim):
                                diff = coords[w, k] - center[k]
                                acc += diff * diff
                            dd = math.sqrt(acc)
                            h = dd - radius
                            h -= _H_SLACK * (dd + radius)
                            if h < 0.0:
                                h = 0.0
                        else:
                            h = 0.0
                        h_buf[w] = h
                    else:
                        h = h_buf[w]
                    dist[w] = ng
                    if size == hk.shape[0]:
                        nk = np.empty(size * 2, np.float64)
                        nv = np.empty(size * 2, np.int64)
                        nk[:size] = hk
                        nv[:size] = hv
                        hk, hv = nk, nv
                    i = size
                    hk[i] = ng + h
                    hv[i] = w
                    size += 1
                    while i > 0:
                        parent = (i - 1) >> 1
                        if hk[i] < hk[parent]:
                            hk[i], hk[parent] = hk[parent], hk[i]
                            hv[i], hv[parent] = hv[parent], hv[i]
                            i = parent
                        else:
                            break

        # whatever is left on the target heap was never settled within the
        # stop radius, so its nearest entry is a candidate at |ab|
        while t_size > 0 and done_mark[tb[0]] == search_id:
            t_size -= 1
            if t_size > 0:
                key = tk[t_size]
                kb = tb[t_size]
                i = 0
                while True:
                    child = 2 * i + 1
                    if child >= t_size:
                        break
                    right = child + 1
                    if right < t_size and (
                        tk[right] < tk[child]
                        or (tk[right] == tk[child] and tb[right] < tb[child])
                    ):
                        child = right
                    if tk[child] < key or (tk[child] == key and tb[child] < kb):
                        tk[i] = tk[child]
                        tb[i] = tb[child]
                        i = child
                    else:
                        break
                tk[i] = key
                tb[i] = kb
        if t_size > 0:
            if tk[0] < best_key or (tk[0] == best_key and tb[0] < best_b):
                best_key = tk[0]
                best_b = tb[0]

        for i in range(count):
            dist[touched[i]] = _INF
        return best_key, best_b, reached_d, reached_b, hk, hv

    @njit(cache=True)
    def dijkstra_to_target(nbr, wts, deg, source, target, bound, dist, touched):
        """Bounded point-to-point distance; +inf when above `bound`.

        Resets the `dist` buffer before returning.
        """
        if source == target:
            return 0.0
        hk = np.empty(64, np.float64)
        hv = np.empty(64, np.int64)
        size = 0
        dist[source] = 0.0
        touched[0] = source
        count = 1
        hk, hv, size = _heap_push(hk, hv, size, 0.0, source)
        result = _INF
        while size > 0:
            d, v, size = _heap_pop(hk, hv, size)
            if d > bound:
                break
            if v == target:
                result = d
                break
            if d > dist[v]:
                continue
            for j in range(deg[v]):
                w = nbr[v, j]
                nd = d + wts[v, j]
                if nd <= bound and nd < dist[w]:
                    if dist[w] == _INF:
                        touched[count] = w
                        count += 1
                    dist[w] = nd
                    hk, hv, size = _heap_push(hk, hv, size, nd, w)
        for i in range(count):
            dist[touched[i]] = _INF
        return result

    @njit(cache=True)
    def astar_to_target(nbr, wts, deg, coords, source, target, bound, dist, touched):
        """A* point-to-point distance with the same contract as the Dijkstra form."""
        if source == target:
            return 0.0
        d_dim = coords.shape[1]
        hk = np.empty(64, np.float64)
        hg = np.empty(64, np.float64)
        hv = np.empty(64, np.int64)

        acc = 0.0
        for k in range(d_dim):
            diff = coords[source, k] - coords[target, k]
            acc += diff * diff
        h0 = math.sqrt(acc) * (1.0 - _H_SLACK)

        dist[source] = 0.0
        touched[0] = source
        count = 1
        hk[0] = h0
        hg[0] = 0.0
        hv[0] = source
        size = 1
        result = _INF
        while size > 0:
            f = hk[0]
            g = hg[0]
            v = hv[0]
            size -= 1
            if size > 0:
                lk = hk[size]
                lg = hg[size]
                lv = hv[size]
                i = 0
                while True:
                    child = 2 * i + 1
                    if child >= size:
                        break
                    right = child + 1
                    if right < size and hk[right] < hk[child]:
                        child = right
                    if hk[child] < lk:
                        hk[i] = hk[child]
                        hg[i] = hg[child]
                        hv[i] = hv[child]
                        i = child
                    else:
                        break
                hk[i] = lk
                hg[i] = lg
                hv[i] = lv
            if f > bound:
                break
            if v == target:
                result = g
                break
            if g > dist[v]:
                continue
            for j in range(deg[v]):
                w = nbr[v, j]
                ng = g + wts[v, j]
                if ng <= bound and ng < dist[w]:
                    if dist[w] == _INF:
                        touched[count] = w
                        count += 1
                    dist[w] = ng
                    acc = 0.0
                    for k in range(d_dim):
                        diff = coords[w, k] - coords[target, k]
                        acc += diff * diff
                    h = math.sqrt(acc) * (1.0 - _H_SLACK)
                    if size == hk.shape[0]:
                        nk = np.empty(size * 2, np.float64)
                        ng_arr = np.empty(size * 2, np.float64)
                        nv = np.empty(size * 2, np.int64)
                        nk[:size] = hk
                        ng_arr[:size] = hg
                        nv[:size] = hv
                        hk, hg, hv = nk, ng_arr, nv
                    i = size
                    hk[i] = ng + h
                    hg[i] = ng
                    hv[i] = w
                    size += 1
                    while i > 0:
                        parent = (i - 1) >> 1
                        if hk[i] < hk[parent]:
                            hk[i], hk[parent] = hk[parent], hk[i]
                            hg[i], hg[parent] = hg[parent], hg[i]
                            hv[i], hv[parent] = hv[parent], hv[i]
                            i = parent
                        else:
                            break
        for i in range(count):
            dist[touched[i]] = _INF
        return result
