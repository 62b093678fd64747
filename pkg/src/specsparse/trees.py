"""Spanning trees: stretch, offline LCA, tree resistances, max-weight trees, spine scaling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Disconnected, TreeDoesNotSpan, TreeNotSubgraph
from .graph import WeightedGraph


@dataclass(frozen=True, eq=False)
class SpanningTree:
    """Rooted spanning tree stored as parent pointers.

    ``prefix[v]`` is the resistance (sum of 1/w) of the root-to-v path, so
    the tree resistance between u and v is
    ``prefix[u] + prefix[v] - 2 * prefix[lca(u, v)]``.
    """

    n: int
    root: int
    parent: np.ndarray
    parent_weight: np.ndarray
    order: np.ndarray  # BFS order, root first
    prefix: np.ndarray
    depth: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_edges(cls, n: int, u, v, w, root: int = 0) -> "SpanningTree":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if n == 0:
            raise TreeDoesNotSpan("empty vertex set")
        if len(u) != n - 1:
            raise TreeDoesNotSpan(f"a spanning tree on {n} vertices needs {n - 1} edges, got {len(u)}")
        if np.any(w <= 0):
            raise TreeDoesNotSpan("tree weights must be positive")
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        ww = np.concatenate([w, w])
        order_e = np.argsort(src, kind="stable")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        nbr = dst[order_e].tolist()
        nw = ww[order_e].tolist()
        ip = indptr.tolist()

        parent = [-1] * n
        pw = [0.0] * n
        seen = [False] * n
        seen[root] = True
        order = [root]
        head = 0
        while head < len(order):
            x = order[head]
            head += 1
            for k in range(ip[x], ip[x + 1]):
                y = nbr[k]
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    pw[y] = nw[k]
                    order.append(y)
        if len(order) != n:
            raise TreeDoesNotSpan(f"edges reach {len(order)} of {n} vertices")
        parent_a = np.array(parent, dtype=np.int64)
        pw_a = np.array(pw, dtype=np.float64)
        order_a = np.array(order, dtype=np.int64)
        prefix = np.zeros(n)
        depth = np.zeros(n, dtype=np.int64)
        inv = np.zeros(n)
        inv[order_a[1:]] = 1.0 / pw_a[order_a[1:]]
        # parents precede children in BFS order
        pre = prefix.tolist()
        dep = depth.tolist()
        invl = inv.tolist()
        for x in order[1:]:
            p = parent[x]
            pre[x] = pre[p] + invl[x]
            dep[x] = dep[p] + 1
        return cls(n, int(root), parent_a, pw_a, order_a, np.array(pre), np.array(dep, dtype=np.int64))

    @classmethod
    def from_graph(cls, T: WeightedGraph, root: int = 0) -> "SpanningTree":
        return cls.from_edges(T.n, T.u, T.v, T.w, root=root)

    # views ---------------------------------------------------------------------

    def edge_arrays(self):
        """(child, parent, weight) arrays for the n-1 tree edges, in BFS order."""
        c = self.order[1:]
        return c, self.parent[c], self.parent_weight[c]

    def to_graph(self) -> WeightedGraph:
        c, p, w = self.edge_arrays()
        return WeightedGraph.from_arrays(self.n, c, p, w, check=False)

    def scaled(self, factor: float) -> "SpanningTree":
        c, p, w = self.edge_arrays()
        return SpanningTree.from_edges(self.n, c, p, w * factor, root=self.root)

    def with_weights(self, w_by_child) -> "SpanningTree":
        """Same tree shape; ``w_by_child[x]`` is the new weight of edge (x, parent(x))."""
        c, p, _ = self.edge_arrays()
        return SpanningTree.from_edges(self.n, c, p, np.asarray(w_by_child)[c], root=self.root)

    def children(self):
        """CSR ``(indptr, kids)`` of the children lists."""
        ch = self._cache.get("children")
        if ch is None:
            c = self.order[1:]
            p = self.parent[c]
            srt = np.argsort(p, kind="stable")
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(p, minlength=self.n), out=indptr[1:])
            ch = self._cache["children"] = (indptr, c[srt])
        return ch

    def total_weight(self) -> float:
        return float(self.parent_weight.sum())


# ---------------------------------------------------------------------------
# offline LCA (Tarjan)
# ---------------------------------------------------------------------------


def offline_lca(T: SpanningTree, qu, qv) -> np.ndarray:
    """Lowest common ancestors for a batch of vertex pairs.

    Tarjan's offline algorithm: one DFS, a union-find keyed by finished
    subtrees, ``O((n + q) alpha(n))`` work.
    """
    qu = np.asarray(qu, dtype=np.int64)
    qv = np.asarray(qv, dtype=np.int64)
    nq = len(qu)
    n = T.n
    out = [-1] * nq
    if nq == 0:
        return np.zeros(0, dtype=np.int64)

    # per-vertex query lists in CSR form
    qsrc = np.concatenate([qu, qv])
    qoth = np.concatenate([qv, qu]).tolist()
    qid = np.concatenate([np.arange(nq), np.arange(nq)])
    srt = np.argsort(qsrc, kind="stable")
    qoth = [qoth[i] for i in srt.tolist()]
    qid = qid[srt].tolist()
    qptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(qsrc, minlength=n), out=qptr[1:])
    qptr = qptr.tolist()

    cptr, kids = T.children()
    cptr = cptr.tolist()
    kids = kids.tolist()
    parent = T.parent.tolist()

    uf = list(range(n))
    anc = list(range(n))
    black = [False] * n

    def find(x):
        r = x
        while uf[r] != r:
            r = uf[r]
        while uf[x] != r:
            uf[x], x = r, uf[x]
        return r

    stack = [T.root]
    nxt = cptr[:]  # next child pointer per vertex
    while stack:
        x = stack[-1]
        k = nxt[x]
        if k < cptr[x + 1]:
            nxt[x] = k + 1
            stack.append(kids[k])
            continue
        stack.pop()
        black[x] = True
        for j in range(qptr[x], qptr[x + 1]):
            y = qoth[j]
            if black[y]:
                out[qid[j]] = anc[find(y)]
        p = parent[x]
        if p >= 0:
            rp = find(p)
            uf[find(x)] = rp
            anc[rp] = p
    return np.array(out, dtype=np.int64)


def tree_resistances(T: SpanningTree, pairs) -> np.ndarray:
    """Series resistance along the tree path for each ``(u, v)`` pair."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        return np.zeros(0)
    a, b = pairs[:, 0], pairs[:, 1]
    lca = offline_lca(T, a, b)
    r = T.prefix[a] + T.prefix[b] - 2.0 * T.prefix[lca]
    return np.maximum(r, 0.0)


def _check_spans(G: WeightedGraph, T: SpanningTree):
    if T.n != G.n:
        raise TreeDoesNotSpan(f"tree has {T.n} vertices, graph has {G.n}")


def compute_stretches(G: WeightedGraph, T: SpanningTree) -> np.ndarray:
    """Per-edge stretch ``w_e * R_T(u, v)`` in G's edge order."""
    _check_spans(G, T)
    if G.m == 0:
        return np.zeros(0)
    R = tree_resistances(T, np.column_stack([G.u, G.v]))
    return G.w * R


def total_stretch(G: WeightedGraph, T: SpanningTree) -> float:
    return float(compute_stretches(G, T).sum())


def _preorder(T: SpanningTree):
    """DFS preorder index and subtree size of every vertex."""
    cptr, kids = T.children()
    cptr = cptr.tolist()
    kids = kids.tolist()
    n = T.n
    tin = [0] * n
    size = [1] * n
    seq = []
    stack = [T.root]
    while stack:
        x = stack.pop()
        tin[x] = len(seq)
        seq.append(x)
        # reversed so children come out in stored order
        stack.extend(reversed(kids[cptr[x]:cptr[x + 1]]))
    parent = T.parent.tolist()
    for x in reversed(seq):
        p = parent[x]
        if p >= 0:
            size[p] += size[x]
    return np.array(tin, dtype=np.int64), np.array(size, dtype=np.int64)


def tree_edge_cuts(G: WeightedGraph, T: SpanningTree) -> np.ndarray:
    """``cap_G(V_x, V - V_x)`` for the subtree V_x below every non-root x.

    Computed from DFS intervals: weighted degree mass inside the subtree minus
    twice the weight of edges with both ends inside it. The inside-edge counts
    come from an offline 2-D dominance sweep with a Fenwick tree, so the
    routine shares no code with the LCA path.
    """
    _check_spans(G, T)
    n = G.n
    tin, size = _preorder(T)
    tout = tin + size - 1
    deg = G.weighted_degrees()
    deg_by_pos = np.zeros(n)
    deg_by_pos[tin] = deg
    csum = np.concatenate([[0.0], np.cumsum(deg_by_pos)])
    sub_deg = csum[tout + 1] - csum[tin]

    a = np.minimum(tin[G.u], tin[G.v])
    b = np.maximum(tin[G.u], tin[G.v])
    e_order = np.argsort(-a, kind="stable")
    ea = a[e_order].tolist()
    eb = b[e_order].tolist()
    ew = G.w[e_order].tolist()
    q_order = np.argsort(-tin, kind="stable").tolist()
    tinl = tin.tolist()
    toutl = tout.tolist()

    fen = [0.0] * (n + 1)
    inside = [0.0] * n
    j = 0
    m = len(ea)
    for x in q_order:
        lo = tinl[x]
        while j < m and ea[j] >= lo:
            i = eb[j] + 1
            wt = ew[j]
            while i <= n:
                fen[i] += wt
                i += i & -i
            j += 1
        i = toutl[x] + 1
        s = 0.0
        while i > 0:
            s += fen[i]
            i -= i & -i
        inside[x] = s
    return sub_deg - 2.0 * np.array(inside)


def stretch_via_cuts(G: WeightedGraph, T: SpanningTree) -> float:
    """Total stretch as the sum over tree edges of cut capacity divided by edge weight."""
    cuts = tree_edge_cuts(G, T)
    c = T.order[1:]
    return float(np.sum(cuts[c] / T.parent_weight[c]))


# ---------------------------------------------------------------------------
# union-find and max-weight spanning tree
# ---------------------------------------------------------------------------


class UnionFind:
    __slots__ = ("parent", "size", "count")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        r = x
        while parent[r] != r:
            r = parent[r]
        while parent[x] != r:
            parent[x], x = r, parent[x]
        return r

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True


def spanning_forest_edges(n: int, u, v, order) -> list[int]:
    """Kruskal scan: indices (in ``order``) of edges that join two components."""
    uf = UnionFind(n)
    ul = u.tolist()
    vl = v.tolist()
    chosen = []
    for e in order.tolist():
        if uf.union(ul[e], vl[e]):
            chosen.append(e)
            if uf.count == 1:
                break
    return chosen


def max_weight_spanning_tree(G: WeightedGraph) -> SpanningTree:
    """Greedy (Kruskal) maximum-weight spanning tree; ties go to the lower edge index."""
    order = np.argsort(-G.w, kind="stable")
    chosen = spanning_forest_edges(G.n, G.u, G.v, order)
    if len(chosen) != G.n - 1:
        raise Disconnected("graph is not connected")
    idx = np.array(chosen, dtype=np.int64)
    return SpanningTree.from_edges(G.n, G.u[idx], G.v[idx], G.w[idx])


def max_weight_spanning_tree_edges(G: WeightedGraph) -> np.ndarray:
    """Edge indices of :func:`max_weight_spanning_tree`, sorted."""
    order = np.argsort(-G.w, kind="stable")
    chosen = spanning_forest_edges(G.n, G.u, G.v, order)
    if len(chosen) != G.n - 1:
        raise Disconnected("graph is not connected")
    return np.sort(np.array(chosen, dtype=np.int64))


# ---------------------------------------------------------------------------
# tree <-> host graph bookkeeping
# ---------------------------------------------------------------------------


def locate_edges(G: WeightedGraph, a, b) -> np.ndarray:
    """Index in G of the first edge joining each (a, b) pair, or -1."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    keys = lo * G.n + hi
    gk = G.edge_keys()
    pos = np.searchsorted(gk, keys)
    pos_c = np.minimum(pos, max(G.m - 1, 0))
    found = (pos < G.m) & (gk[pos_c] == keys) if G.m else np.zeros(len(keys), bool)
    return np.where(found, pos_c, -1)


def tree_edges_in(G: WeightedGraph, T: SpanningTree) -> np.ndarray:
    """G-edge index of every tree edge (BFS order); raises if one is missing."""
    _check_spans(G, T)
    c, p, _ = T.edge_arrays()
    idx = locate_edges(G, c, p)
    if np.any(idx < 0):
        bad = int(np.flatnonzero(idx < 0)[0])
        raise TreeNotSubgraph(f"tree edge ({c[bad]}, {p[bad]}) is not an edge of the graph")
    return idx


def restore_weights(T: SpanningTree, G: WeightedGraph) -> SpanningTree:
    """The same tree with each edge carrying its weight in G."""
    idx = tree_edges_in(G, T)
    w = np.zeros(T.n)
    w[T.order[1:]] = G.w[idx]
    return T.with_weights(w)


def scale_spine(G: WeightedGraph, T: SpanningTree, kappa: float) -> WeightedGraph:
    """G with the weights of T's edges multiplied by ``kappa`` (so G <= H <= kappa G)."""
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    idx = tree_edges_in(G, T)
    w = G.w.copy()
    w[idx] *= kappa
    return G.with_weights(w)


def spine_kappa(st_total: float, n: int, m: int, c: float = 1.0) -> float:
    """Tree boost that brings total stretch down to about m / log2(n)."""
    if n <= 2 or m == 0:
        return 1.0
    return float(max(1.0, np.ceil(c * st_total * np.log2(n) / m)))
