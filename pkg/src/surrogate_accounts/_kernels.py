"""Hot loops: surrogate-edge search, component labelling, directed reachability.

Each kernel has a numba implementation and a vectorised numpy one. The numpy
path is used when numba is missing or when ``SURROGATE_ACCOUNTS_BACKEND=numpy``.
Both paths return identical results; tests compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba ships with the dev environment
    numba = None
    HAVE_NUMBA = False

INF = np.iinfo(np.int64).max


def _requested_backend() -> str:
    name = os.environ.get("SURROGATE_ACCOUNTS_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"SURROGATE_ACCOUNTS_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


BACKEND = _requested_backend()


# --------------------------------------------------------------------------
# numpy implementations


def surrogate_edges_numpy(
    n: int,
    src: np.ndarray,
    dst: np.ndarray,
    start_ok: np.ndarray,
    end_ok: np.ndarray,
    present: np.ndarray,
    blocked: np.ndarray,
    adj: np.ndarray,
) -> np.ndarray:
    """Surrogate-edge construction over the non-Hide edges ``src -> dst``.

    ``start_ok`` flags edges whose source incidence is Visible, ``end_ok`` those
    whose target incidence is Visible; ``adj`` is the account adjacency holding
    the preserved edges and is extended in place.

    Phase 1 follows walks of length >= 2 that leave ``a`` through a Visible
    incidence and stop at the first present node entered through a Visible
    incidence; a present node entered and left through Visible incidences is a
    relay and ends the walk. Every such endpoint ``b`` that the preserved edges
    do not already reach from ``a`` gets ``a -> b``.

    Phase 2 closes the gaps phase 1 leaves (relays whose prefix edge is blocked
    by a Hide-marked direct edge): for each source in index order, targets of
    any permitted walk are visited by (walk length, index) and joined only if
    the account does not already reach them.
    """
    usable_from = present[src]  # relay test needs the source's presence
    added = []
    for a in range(n):
        if not present[a]:
            continue
        firsts = (src == a) & start_ok
        if not firsts.any():
            continue
        # states: entered-through-Visible flag x node; depth-1 states kept apart
        shallow = np.zeros((2, n), dtype=bool)
        shallow[end_ok[firsts].astype(np.int64), dst[firsts]] = True
        deep = np.zeros((2, n), dtype=bool)
        frontier = shallow.copy()
        while frontier.any():
            nxt = np.zeros((2, n), dtype=bool)
            for ev in (0, 1):
                if not frontier[ev].any():
                    continue
                move = frontier[ev][src]
                if ev:
                    move &= ~(usable_from & start_ok)
                nxt[end_ok[move].astype(np.int64), dst[move]] = True
            nxt[:, a] = False
            nxt &= ~deep
            deep |= nxt
            frontier = nxt
        targets = np.flatnonzero(deep[1] & present)
        if targets.size == 0:
            continue
        reach = _reach_from_numpy(adj, a)
        for b in targets:
            if b != a and not blocked[a, b] and not reach[b]:
                added.append((a, b))
    for a, b in added:
        adj[a, b] = True

    step = np.zeros((n, n), dtype=bool)
    step[src, dst] = True
    first = np.zeros((n, n), dtype=bool)
    first[src[start_ok], dst[start_ok]] = True
    last = np.zeros((n, n), dtype=bool)
    last[src[end_ok], dst[end_ok]] = True
    last[:, ~present] = False

    for a in range(n):
        if not present[a] or not first[a].any():
            continue
        level = np.full(n, INF, dtype=np.int64)
        seen = first[a].copy()
        frontier = seen.copy()
        seen[a] = True
        depth = 1
        while frontier.any():
            hit = last[frontier].any(axis=0) & (level == INF)
            level[hit] = depth + 1
            nxt = step[frontier].any(axis=0) & ~seen
            seen |= nxt
            frontier = nxt
            depth += 1
        level[a] = INF
        level[blocked[a]] = INF
        targets = np.flatnonzero(level != INF)
        if targets.size == 0:
            continue
        targets = targets[np.argsort(level[targets] * n + targets, kind="stable")]

        reach = _reach_from_numpy(adj, a)
        for b in targets:
            if reach[b]:
                continue
            adj[a, b] = True
            added.append((a, b))
            reach[b] = True
            reach |= _reach_from_numpy(adj, b)
    if not added:
        return np.zeros((0, 2), dtype=np.int64)
    return np.asarray(added, dtype=np.int64)


def _reach_from_numpy(adj: np.ndarray, a: int) -> np.ndarray:
    reach = adj[a].copy()
    frontier = reach.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~reach
        reach |= nxt
        frontier = nxt
    return reach


def component_labels_numpy(n: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Weakly connected component labels (smallest member index) by min-label propagation."""
    labels = np.arange(n, dtype=np.int64)
    if len(src) == 0:
        return labels
    while True:
        lo = np.minimum(labels[src], labels[dst])
        new = labels.copy()
        np.minimum.at(new, src, lo)
        np.minimum.at(new, dst, lo)
        new = new[new]  # pointer jumping
        if np.array_equal(new, labels):
            return labels
        labels = new


def reachability_numpy(n: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Boolean matrix R with R[i, j] iff a directed path of length >= 1 leads from i to j."""
    reach = np.zeros((n, n), dtype=bool)
    reach[src, dst] = True
    while True:
        nxt = reach | ((reach.astype(np.uint8) @ reach.astype(np.uint8)) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


# --------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _csr(n, src, dst):
        indptr = np.zeros(n + 1, dtype=np.int64)
        for i in range(len(src)):
            indptr[src[i] + 1] += 1
        for i in range(n):
            indptr[i + 1] += indptr[i]
        order = np.argsort(src, kind="mergesort")
        return indptr, order

    @numba.njit(cache=True)
    def _reach_extend(adj, start, reach, stack):
        top = 0
        stack[top] = start
        top += 1
        n = adj.shape[0]
        while top > 0:
            top -= 1
            u = stack[top]
            for v in range(n):
                if adj[u, v] and not reach[v]:
                    reach[v] = True
                    stack[top] = v
                    top += 1

    @numba.njit(cache=True)
    def surrogate_edges_numba(n, src, dst, start_ok, end_ok, present, blocked, adj):
        indptr, order = _csr(n, src, dst)
        out_a = []
        out_b = []
        depth = np.empty(n, dtype=np.int64)
        level = np.empty(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        stack = np.empty(n + 1, dtype=np.int64)
        reach = np.empty(n, dtype=np.bool_)
        # phase 1: relay-free walks
        s_ev = np.empty(4 * n, dtype=np.int64)
        seen = np.empty(4 * n, dtype=np.bool_)
        for a in range(n):
            if not present[a]:
                continue
            seen[:] = False
            head = 0
            tail = 0
            for k in range(indptr[a], indptr[a + 1]):
                e = order[k]
                if start_ok[e]:
                    st = (1 if end_ok[e] else 0) * n + dst[e]
                    if not seen[st]:
                        seen[st] = True
                        s_ev[tail] = st
                        tail += 1
            while head < tail:
                st = s_ev[head]
                head += 1
                ev = (st // n) % 2
                v = st % n
                for k in range(indptr[v], indptr[v + 1]):
                    e = order[k]
                    if ev == 1 and present[v] and start_ok[e]:
                        continue
                    w = dst[e]
                    if w == a:
                        continue
                    nst = 2 * n + (1 if end_ok[e] else 0) * n + w
                    if not seen[nst]:
                        seen[nst] = True
                        s_ev[tail] = nst
                        tail += 1
            reach[:] = False
            _reach_extend(adj, a, reach, stack)
            for b in range(n):
                if seen[3 * n + b] and present[b] and b != a and not blocked[a, b] and not reach[b]:
                    out_a.append(a)
                    out_b.append(b)
        for i in range(len(out_a)):
            adj[out_a[i], out_b[i]] = True

        # phase 2: close remaining gaps
        for a in range(n):
            if not present[a]:
                continue
            depth[:] = -1
            depth[a] = 0
            level[:] = INF
            head = 0
            tail = 0
            for k in range(indptr[a], indptr[a + 1]):
                e = order[k]
                if start_ok[e] and depth[dst[e]] < 0:
                    depth[dst[e]] = 1
                    queue[tail] = dst[e]
                    tail += 1
            if tail == 0:
                continue
            while head < tail:
                y = queue[head]
                head += 1
                for k in range(indptr[y], indptr[y + 1]):
                    e = order[k]
                    b = dst[e]
                    if end_ok[e] and present[b] and level[b] == INF:
                        level[b] = depth[y] + 1
                    if depth[b] < 0:
                        depth[b] = depth[y] + 1
                        queue[tail] = b
                        tail += 1
            level[a] = INF
            count = 0
            for b in range(n):
                if blocked[a, b]:
                    level[b] = INF
                if level[b] != INF:
                    count += 1
            if count == 0:
                continue
            keys = np.empty(count, dtype=np.int64)
            j = 0
            for b in range(n):
                if level[b] != INF:
                    keys[j] = level[b] * n + b
                    j += 1
            keys.sort()

            reach[:] = False
            _reach_extend(adj, a, reach, stack)
            for j in range(count):
                b = keys[j] % n
                if reach[b]:
                    continue
                adj[a, b] = True
                out_a.append(a)
                out_b.append(b)
                reach[b] = True
                _reach_extend(adj, b, reach, stack)
        res = np.empty((len(out_a), 2), dtype=np.int64)
        for i in range(len(out_a)):
            res[i, 0] = out_a[i]
            res[i, 1] = out_b[i]
        return res

    @numba.njit(cache=True)
    def _find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    @numba.njit(cache=True)
    def component_labels_numba(n, src, dst):
        parent = np.arange(n)
        for i in range(len(src)):
            ra = _find(parent, src[i])
            rb = _find(parent, dst[i])
            if ra < rb:
                parent[rb] = ra
            elif rb < ra:
                parent[ra] = rb
        labels = np.empty(n, dtype=np.int64)
        for i in range(n):
            labels[i] = _find(parent, i)
        return labels

    @numba.njit(cache=True)
    def reachability_numba(n, src, dst):
        indptr, order = _csr(n, src, dst)
        reach = np.zeros((n, n), dtype=np.bool_)
        stack = np.empty(n + 1, dtype=np.int64)
        for s in range(n):
            top = 0
            stack[top] = s
            top += 1
            while top > 0:
                top -= 1
                u = stack[top]
                for k in range(indptr[u], indptr[u + 1]):
                    v = dst[order[k]]
                    if not reach[s, v]:
                        reach[s, v] = True
                        stack[top] = v
                        top += 1
        return reach

else:  # pragma: no cover
    surrogate_edges_numba = surrogate_edges_numpy
    component_labels_numba = component_labels_numpy
    reachability_numba = reachability_numpy


_IMPLS = {
    "numba": (surrogate_edges_numba, component_labels_numba, reachability_numba),
    "numpy": (surrogate_edges_numpy, component_labels_numpy, reachability_numpy),
}


def _as_index(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.int64)


def surrogate_edges(n, src, dst, start_ok, end_ok, present, blocked, adj, backend: str | None = None):
    fn = _IMPLS[backend or BACKEND][0]
    return fn(
        int(n),
        _as_index(src),
        _as_index(dst),
        np.ascontiguousarray(start_ok, dtype=np.bool_),
        np.ascontiguousarray(end_ok, dtype=np.bool_),
        np.ascontiguousarray(present, dtype=np.bool_),
        np.ascontiguousarray(blocked, dtype=np.bool_),
        adj,
    )


def component_labels(n, src, dst, backend: str | None = None) -> np.ndarray:
    return _IMPLS[backend or BACKEND][1](int(n), _as_index(src), _as_index(dst))


def reachability(n, src, dst, backend: str | None = None) -> np.ndarray:
    return _IMPLS[backend or BACKEND][2](int(n), _as_index(src), _as_index(dst))
