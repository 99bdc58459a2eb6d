"""Fill-reducing orderings on the symmetrized sparsity graph.

Three strategies: natural (no-op), exact minimum degree (reference
implementation that simulates elimination on an explicit graph), and
approximate minimum degree (quotient-graph AMD with supervariable merging,
external-degree bounds, and aggressive element absorption). The elimination
game doubles as the brute-force fill oracle for all of them.

Tie-breaking is lowest-index-first everywhere so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .sparse import Permutation, SparseMatrix, _expand_cols

__all__ = [
    "EliminationGraph",
    "OrderingResult",
    "build_graph",
    "elimination_game",
    "exact_min_degree",
    "amd",
    "natural_ordering",
]


@dataclass(frozen=True)
class EliminationGraph:
    """Undirected adjacency (CSR, sorted, no self-loops) of pattern(A + A^T)."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(self.indptr[-1]) // 2

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]


@dataclass(frozen=True)
class OrderingResult:
    """A fill-reducing permutation plus its exact symbolic fill.

    ``predicted_fill`` counts strictly-lower-triangular fill entries under
    symbolic elimination and always equals the elimination game's count for
    the same (graph, order).
    """

    permutation: Permutation
    predicted_fill: int
    strategy: str


def build_graph(a: SparseMatrix) -> EliminationGraph:
    """Elimination graph of a square matrix: edge (i,j) iff A(i,j) or A(j,i) stored."""
    if a.n_rows != a.n_cols:
        raise ValueError(f"matrix must be square, got {a.n_rows}x{a.n_cols}")
    n = a.n_rows
    rows = a.indices
    cols = _expand_cols(a.indptr, n)
    off = rows != cols
    r, c = rows[off], cols[off]
    # undirected: encode both directions, dedupe
    lo = np.concatenate([np.minimum(r, c), np.maximum(r, c)])
    hi = np.concatenate([np.maximum(r, c), np.minimum(r, c)])
    codes = np.unique(lo * n + hi)
    src = codes // n
    dst = codes % n
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return EliminationGraph(n, indptr, dst.astype(np.int64))


def natural_ordering(n: int) -> OrderingResult:
    return OrderingResult(Permutation.identity(n), 0, "natural")


# -- elimination game ----------------------------------------------------------
#
# Both the game and exact minimum degree maintain the current (partially
# eliminated) graph as explicit per-node sorted neighbor windows inside one
# flat workspace, reallocating and compacting as fill accumulates.


@njit(cache=True, nogil=True)
def _game_run(n, gp, gi, order, select_min_degree):
    """Simulate elimination; returns (fill, order_out).

    order is honored when select_min_degree is False; otherwise the pivot is
    the lowest-index node among those of minimum current degree and the
    realized order is written to order_out.
    """
    nnz = gi.shape[0]
    cap_total = 2 * nnz + 8 * n + 64
    iw = np.empty(cap_total, dtype=np.int64)
    pe = np.empty(n, dtype=np.int64)
    ln = np.empty(n, dtype=np.int64)
    cap = np.empty(n, dtype=np.int64)
    alive = np.ones(n, dtype=np.uint8)
    tail = 0
    for v in range(n):
        d = gp[v + 1] - gp[v]
        pe[v] = tail
        ln[v] = d
        cap[v] = d + 2
        for k in range(d):
            iw[tail + k] = gi[gp[v] + k]
        tail += cap[v]

    nv_buf = np.empty(n, dtype=np.int64)
    merge_buf = np.empty(n, dtype=np.int64)
    order_out = np.empty(n, dtype=np.int64)
    fill2 = 0

    for step in range(n):
        if select_min_degree:
            v = -1
            best = n + 1
            for u in range(n):
                if alive[u] and ln[u] < best:
                    best = ln[u]
                    v = u
        else:
            v = order[step]
        order_out[step] = v

        m = ln[v]
        for k in range(m):
            nv_buf[k] = iw[pe[v] + k]
        alive[v] = 0

        for a_i in range(m):
            a = nv_buf[a_i]
            # merge (nv_buf minus {a}) into adj[a], dropping v
            la = ln[a]
            pa = pe[a]
            i = 0  # adj[a] cursor
            j = 0  # nv_buf cursor
            w = 0
            while i < la or j < m:
                if j < m and (nv_buf[j] == a or nv_buf[j] == v):
                    j += 1
                    continue
                if i < la and iw[pa + i] == v:
                    i += 1
                    continue
                if i >= la:
                    merge_buf[w] = nv_buf[j]
                    j += 1
                elif j >= m:
                    merge_buf[w] = iw[pa + i]
                    i += 1
                elif iw[pa + i] < nv_buf[j]:
                    merge_buf[w] = iw[pa + i]
                    i += 1
                elif iw[pa + i] > nv_buf[j]:
                    merge_buf[w] = nv_buf[j]
                    j += 1
                else:
                    merge_buf[w] = nv_buf[j]
                    i += 1
                    j += 1
                w += 1
            # additions relative to the old list without v
            old_wo_v = la
            for t in range(la):
                if iw[pa + t] == v:
                    old_wo_v = la - 1
                    break
            fill2 += w - old_wo_v

            if w <= cap[a]:
                for t in range(w):
                    iw[pa + t] = merge_buf[t]
                ln[a] = w
            else:
                need = w + 4 + w // 2
                if tail + need > iw.shape[0]:
                    # compact live windows, then grow if still needed
                    new_size = iw.shape[0]
                    used = 0
                    for u in range(n):
                        if alive[u] or u == a:
                            used += ln[u] + 2
                    while used + need > new_size:
                        new_size *= 2
                    iw2 = np.empty(new_size, dtype=np.int64)
                    t2 = 0
                    for u in range(n):
                        if alive[u] or u == a:
                            for t in range(ln[u]):
                                iw2[t2 + t] = iw[pe[u] + t]
                            pe[u] = t2
                            cap[u] = ln[u] + 2
                            t2 += cap[u]
                    iw = iw2
                    tail = t2
                pe[a] = tail
                cap[a] = need
                for t in range(w):
                    iw[tail + t] = merge_buf[t]
                ln[a] = w
                tail += need
    return fill2 // 2, order_out


def elimination_game(graph: EliminationGraph, order: Permutation) -> int:
    """Fill edges added by Gaussian elimination of the graph in the given order.

    Eliminating a node turns its remaining neighbors into a clique; the count
    of edges added over the whole run is returned. Deterministic.
    """
    if order.n != graph.n:
        raise ValueError("order length does not match graph size")
    seq = order.inverse  # position k holds the k-th eliminated node
    fill, _ = _game_run(graph.n, graph.indptr, graph.indices, seq, False)
    return int(fill)


def exact_min_degree(graph: EliminationGraph) -> OrderingResult:
    """Reference minimum-degree ordering on the explicit elimination graph.

    At each step the lowest-index node among those of minimum current degree
    is eliminated; the fill generated by that simulation is exact.
    """
    dummy = np.empty(0, dtype=np.int64)
    fill, seq = _game_run(graph.n, graph.indptr, graph.indices, dummy, True)
    return OrderingResult(Permutation.from_elimination_order(seq), int(fill), "exact_md")


# -- approximate minimum degree ------------------------------------------------
#
# Quotient-graph AMD: eliminated pivots become elements, adjacency lists hold
# element ids followed by supervariable ids, degrees are Amestoy-style upper
# bounds on the external degree, indistinguishable supervariables are hash-
# detected and merged, and elements fully covered by a new pivot element are
# aggressively absorbed.

_KIND_VAR = 0
_KIND_ELEM = 1
_KIND_DEAD = 2
_KIND_MERGED = 3


@njit(cache=True, nogil=True)
def _amd_run(n, gp, gi, prefer_mass):
    nnz = gi.shape[0]
    cap_total = nnz + 9 * n + 128
    iw = np.empty(cap_total, dtype=np.int64)
    pe = np.empty(n, dtype=np.int64)
    ln = np.zeros(n, dtype=np.int64)   # total list length
    ne = np.zeros(n, dtype=np.int64)   # leading element count (vars only)
    nv = np.ones(n, dtype=np.int64)    # supervariable sizes
    kind = np.zeros(n, dtype=np.int64)
    degree = np.empty(n, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    w = np.zeros(n, dtype=np.int64)    # mark / |Le \ Lp| workspace
    dsum = np.zeros(n, dtype=np.int64)
    hash_of = np.zeros(n, dtype=np.int64)

    # degree buckets (doubly linked, bucket_of tracks membership)
    head = np.full(n + 1, -1, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    prv = np.full(n, -1, dtype=np.int64)
    bucket_of = np.full(n, -1, dtype=np.int64)

    tail = 0
    for v in range(n):
        d = gp[v + 1] - gp[v]
        pe[v] = tail
        ln[v] = d
        degree[v] = d
        for k in range(d):
            iw[tail + k] = gi[gp[v] + k]
        tail += d

    for v0 in range(n):
        v = n - 1 - v0
        d = degree[v]
        nxt[v] = head[d]
        prv[v] = -1
        if head[d] != -1:
            prv[head[d]] = v
        head[d] = v
        bucket_of[v] = d

    lp_buf = np.empty(2 * n + 2, dtype=np.int64)
    cand_buf = np.empty(n, dtype=np.int64)
    pivots = np.empty(n, dtype=np.int64)
    hhead = np.full(n + 2, -1, dtype=np.int64)
    hnext = np.full(n, -1, dtype=np.int64)
    npiv = 0
    nel = 0
    mindeg = 0
    # w-tags grow monotonically; int64 cannot wrap at any feasible run length
    wflg = 1

    while nel < n:
        # -- pivot selection from the first nonempty bucket: largest
        # supervariable first when prefer_mass is set, then lowest index
        while mindeg <= n and head[mindeg] == -1:
            mindeg += 1
        p = head[mindeg]
        u = nxt[p]
        while u != -1:
            if prefer_mass:
                if nv[u] > nv[p] or (nv[u] == nv[p] and u < p):
                    p = u
            elif u < p:
                p = u
            u = nxt[u]
        # unlink p from its bucket
        if prv[p] != -1:
            nxt[prv[p]] = nxt[p]
        else:
            head[bucket_of[p]] = nxt[p]
        if nxt[p] != -1:
            prv[nxt[p]] = prv[p]
        bucket_of[p] = -1

        # -- build Lp = (union of member lists) \ {p}, pruning dead entries
        # wtag marks Lp membership; etag anchors the |Le \ Lp| counters, whose
        # stored values reach etag + n, so the flag must advance past that
        # before the next round (stale w entries must stay below future tags)
        wtag = wflg
        etag = wflg + 1
        wflg += n + 3
        nlp = 0
        lpsize = 0
        for k in range(ne[p]):
            e = iw[pe[p] + k]
            if kind[e] != _KIND_ELEM:
                continue
            for t in range(ln[e]):
                v = iw[pe[e] + t]
                if kind[v] == _KIND_VAR and nv[v] > 0 and v != p and w[v] != wtag:
                    w[v] = wtag
                    lp_buf[nlp] = v
                    nlp += 1
                    lpsize += nv[v]
            kind[e] = _KIND_DEAD
            parent[e] = p
        for k in range(ne[p], ln[p]):
            v = iw[pe[p] + k]
            if kind[v] == _KIND_VAR and nv[v] > 0 and v != p and w[v] != wtag:
                w[v] = wtag
                lp_buf[nlp] = v
                nlp += 1
                lpsize += nv[v]

        nvpiv = nv[p]
        nel += nvpiv
        pivots[npiv] = p
        npiv += 1
        kind[p] = _KIND_ELEM
        degree[p] = lpsize

        # store Lp as p's element list (allocate at tail; collect garbage
        # first when the workspace is full)
        if tail + nlp > iw.shape[0]:
            new_size = iw.shape[0]
            used = 0
            for v in range(n):
                if (kind[v] == _KIND_VAR and nv[v] > 0) or kind[v] == _KIND_ELEM:
                    used += ln[v]
            while used + nlp + n > new_size:
                new_size *= 2
            iw2 = np.empty(new_size, dtype=np.int64)
            t2 = 0
            for v in range(n):
                if (kind[v] == _KIND_VAR and nv[v] > 0) or kind[v] == _KIND_ELEM:
                    for t in range(ln[v]):
                        iw2[t2 + t] = iw[pe[v] + t]
                    pe[v] = t2
                    t2 += ln[v]
            iw = iw2
            tail = t2
        pe[p] = tail
        for k in range(nlp):
            iw[tail + k] = lp_buf[k]
        ln[p] = nlp
        ne[p] = 0
        tail += nlp

        if nlp == 0:
            continue

        # -- scan 1: afterwards w[e] - etag = |Le \ Lp| in variable units
        for k in range(nlp):
            i = lp_buf[k]
            for t in range(ne[i]):
                e = iw[pe[i] + t]
                if kind[e] != _KIND_ELEM or e == p:
                    continue
                if w[e] < etag:
                    w[e] = etag + degree[e]
                w[e] -= nv[i]

        # -- scan 2: rewrite member lists, externals sum, hash
        # note: wtag still marks exactly the members of Lp
        for k in range(nlp):
            i = lp_buf[k]
            src = pe[i]
            s = 0
            h = np.int64(p)
            new_ne = 0
            for t in range(ne[i]):
                e = iw[src + t]
                if kind[e] != _KIND_ELEM or e == p:
                    continue
                ext = w[e] - etag
                if ext == 0:
                    # aggressive absorption: Le is covered by the new element
                    kind[e] = _KIND_DEAD
                    parent[e] = p
                    continue
                s += ext
                lp_buf[nlp + 1 + new_ne] = e  # scratch past the Lp prefix
                new_ne += 1
                h += e
            nvars = 0
            for t in range(ne[i], ln[i]):
                v = iw[src + t]
                if kind[v] != _KIND_VAR or nv[v] <= 0 or v == p:
                    continue
                if w[v] == wtag:
                    continue  # inside Lp: covered by the new element
                s += nv[v]
                cand_buf[nvars] = v
                nvars += 1
                h += v
            # rewrite in place: [p, surviving elements..., outside variables...]
            iw[src] = p
            for t in range(new_ne):
                iw[src + 1 + t] = lp_buf[nlp + 1 + t]
            for t in range(nvars):
                iw[src + 1 + new_ne + t] = cand_buf[t]
            ne[i] = new_ne + 1
            ln[i] = new_ne + 1 + nvars
            dsum[i] = s
            hash_of[i] = h % (n + 1)

        # -- supervariable detection among Lp members (hash chains + exact compare)
        for k in range(nlp):
            i = lp_buf[k]
            if kind[i] != _KIND_VAR or nv[i] <= 0:
                continue
            h = hash_of[i]
            hnext[i] = hhead[h]
            hhead[h] = i
        for k in range(nlp):
            i = lp_buf[k]
            if kind[i] != _KIND_VAR or nv[i] <= 0:
                continue
            h = hash_of[i]
            if hhead[h] == -2:
                continue  # bucket already processed
            nc = 0
            u = hhead[h]
            while u != -1:
                cand_buf[nc] = u
                nc += 1
                u = hnext[u]
            hhead[h] = -2
            for a in range(nc):
                va = cand_buf[a]
                if kind[va] != _KIND_VAR or nv[va] <= 0:
                    continue
                for b in range(a + 1, nc):
                    vb = cand_buf[b]
                    if kind[vb] != _KIND_VAR or nv[vb] <= 0:
                        continue
                    if ln[va] != ln[vb] or ne[va] != ne[vb]:
                        continue
                    ctag = wflg
                    wflg += 1
                    for t in range(ln[va]):
                        w[iw[pe[va] + t]] = ctag
                    same = True
                    for t in range(ln[vb]):
                        if w[iw[pe[vb] + t]] != ctag:
                            same = False
                            break
                    if not same:
                        continue
                    keep = va if va < vb else vb
                    drop = vb if va < vb else va
                    nv[keep] += nv[drop]
                    nv[drop] = 0
                    kind[drop] = _KIND_MERGED
                    parent[drop] = keep
                    if bucket_of[drop] != -1:
                        if prv[drop] != -1:
                            nxt[prv[drop]] = nxt[drop]
                        else:
                            head[bucket_of[drop]] = nxt[drop]
                        if nxt[drop] != -1:
                            prv[nxt[drop]] = prv[drop]
                        bucket_of[drop] = -1
                    if drop == va:
                        break
        for k in range(nlp):
            i = lp_buf[k]
            h = hash_of[i]
            if hhead[h] == -2:
                hhead[h] = -1

        # -- final approximate external degrees and bucket placement
        for k in range(nlp):
            i = lp_buf[k]
            if kind[i] != _KIND_VAR or nv[i] <= 0:
                continue
            ext_lp = lpsize - nv[i]
            if ext_lp < 0:
                ext_lp = 0
            d = n - nel - nv[i]
            b = degree[i] + ext_lp
            if b < d:
                d = b
            b = dsum[i] + ext_lp
            if b < d:
                d = b
            if d < 0:
                d = 0
            degree[i] = d
            if bucket_of[i] != -1:
                if prv[i] != -1:
                    nxt[prv[i]] = nxt[i]
                else:
                    head[bucket_of[i]] = nxt[i]
                if nxt[i] != -1:
                    prv[nxt[i]] = prv[i]
            nxt[i] = head[d]
            prv[i] = -1
            if head[d] != -1:
                prv[head[d]] = i
            head[d] = i
            bucket_of[i] = d
            if d < mindeg:
                mindeg = d

    return pivots[:npiv], parent, nv


def _amd_order(graph: EliminationGraph, prefer_mass: bool = False) -> np.ndarray:
    """Elimination sequence (original node ids) from the AMD kernel."""
    n = graph.n
    if n == 0:
        return np.empty(0, dtype=np.int64)
    pivots, parent, _ = _amd_run(n, graph.indptr, graph.indices, prefer_mass)
    # expand supervariables: members merged into a principal are eliminated
    # together with it, lowest index first
    members = {int(p): [int(p)] for p in pivots}
    for j in range(n):
        if parent[j] != -1 and j not in members:
            r = int(parent[j])
            while parent[r] != -1 and r not in members:
                r = int(parent[r])
            members.setdefault(r, [r]).append(j)
    seq = np.empty(n, dtype=np.int64)
    k = 0
    for p in pivots:
        for v in sorted(members[int(p)]):
            seq[k] = v
            k += 1
    if k != n:
        raise AssertionError("AMD lost track of variables (internal error)")
    return seq


def amd(graph: EliminationGraph, predict_fill: bool = True) -> OrderingResult:
    """Approximate minimum degree ordering (quotient graph, supervariables).

    Deterministic: ties break toward the lowest supervariable index. The
    returned fill is measured exactly by replaying the order through the
    elimination game; pass ``predict_fill=False`` to skip that replay when
    only the permutation is needed.
    """
    seq = _amd_order(graph)
    perm = Permutation.from_elimination_order(seq)
    fill = elimination_game(graph, perm) if predict_fill else -1
    return OrderingResult(perm, fill, "amd")
