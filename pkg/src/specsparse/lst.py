"""Low-stretch spanning trees and incremental cut sparsifiers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Disconnected
from .graph import WeightedGraph
from .rng import as_generator, child
from .trees import (
    SpanningTree,
    UnionFind,
    max_weight_spanning_tree_edges,
    restore_weights,
)

# AKPW tuning: ratio between consecutive length classes, and the ball-growing
# boundary fraction. Chosen by measuring total stretch on grids and random
# weighted graphs (see tests/test_lst.py regression baselines).
DEFAULT_CLASS_RATIO = 3.0
DEFAULT_BETA = 0.25


def _cluster_round(k, eu, ev, order_rank, beta, rng):
    """One round of ball growing on a contracted multigraph with ``k`` vertices.

    ``eu, ev`` are contracted endpoints of the active edges, listed shortest
    first; ``order_rank`` maps list position back to the caller's edge id.
    Returns the list of caller edge ids forming the BFS forests of the balls.
    """
    adj = [[] for _ in range(k)]
    for i, (a, b) in enumerate(zip(eu, ev)):
        adj[a].append((b, i))
        adj[b].append((a, i))

    clustered = [False] * k
    chosen = []
    for s in rng.permutation(k).tolist():
        if clustered[s]:
            continue
        clustered[s] = True
        frontier = [s]
        internal = 0
        while True:
            best = {}
            boundary = 0
            for x in frontier:
                for y, i in adj[x]:
                    if not clustered[y]:
                        boundary += 1
                        j = best.get(y)
                        if j is None or i < j:
                            best[y] = i
            if boundary <= beta * (internal + 1):
                break
            internal += boundary
            frontier = list(best)
            for y in frontier:
                clustered[y] = True
                chosen.append(order_rank[best[y]])
    return chosen


def low_stretch_tree(G: WeightedGraph, rng=None, class_ratio: float = DEFAULT_CLASS_RATIO, beta: float = DEFAULT_BETA) -> SpanningTree:
    """AKPW-style low-stretch spanning tree.

    Edges are bucketed into length classes (length = 1/w) growing by
    ``class_ratio``. Working from the shortest class upward, the current
    components are contracted and clustered by BFS ball growing over the
    active edges; each ball's BFS tree joins the spanning tree. The achieved
    stretch is not certified; measure it with :func:`compute_stretches`.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    rng = as_generator(rng)
    n, m = G.n, G.m
    if n == 1:
        return SpanningTree.from_edges(1, [], [], [])
    if m < n - 1 or not G.is_connected():
        raise Disconnected("low-stretch tree needs a connected graph")

    length = 1.0 / G.w
    by_len = np.argsort(length, kind="stable")
    cls_all = np.floor(np.log(length / length.min()) / math.log(class_ratio) + 1e-12).astype(np.int64)
    cls_sorted = cls_all[by_len]
    u_sorted = G.u[by_len]
    v_sorted = G.v[by_len]

    uf = UnionFind(n)
    tree = []
    j = int(cls_sorted[0])
    while uf.count > 1:
        roots = np.array([uf.find(x) for x in range(n)], dtype=np.int64)
        ru, rv = roots[u_sorted], roots[v_sorted]
        cross = ru != rv
        active = cross & (cls_sorted <= j)
        if not active.any():
            j = int(cls_sorted[cross].min())
            continue
        labels, inv = np.unique(np.concatenate([ru[active], rv[active]]), return_inverse=True)
        na = int(active.sum())
        picked = _cluster_round(
            len(labels), inv[:na].tolist(), inv[na:].tolist(), by_len[active].tolist(), beta, rng
        )
        for e in picked:
            if uf.union(int(G.u[e]), int(G.v[e])):
                tree.append(e)
        j += 1
    idx = np.array(tree, dtype=np.int64)
    return SpanningTree.from_edges(n, G.u[idx], G.v[idx], G.w[idx])


@dataclass
class CutApproxResult:
    """Output of :func:`incremental_cut_sparsifier`.

    ``tau`` is the factor for which ``tau * cap_H(S) >= cap_G(S)`` holds for
    every cut with high probability; ``scale`` is the tree boost S.
    """

    H: WeightedGraph
    tau: float
    p: float
    scale: int
    weight_factor: float
    tree_edges: np.ndarray
    expected_edges: float

    @property
    def edge_count(self) -> int:
        return self.H.m


def incremental_cut_sparsifier(
    G: WeightedGraph,
    target_density: float | None = None,
    *,
    c_rho: float = 8.0,
    c_scale: float = 1.0,
    rng=None,
) -> CutApproxResult:
    """Sparser graph H whose cuts are within a ``tau`` factor of G's.

    Steps: integer-round the weights; take a maximum-weight spanning tree T;
    boost T by S = ceil(c_scale * ln^2 n), viewing each boosted edge as S
    parallel copies; keep every copy independently with probability
    ``p = min(1, c_rho * ln n / S)`` (or ``target_density``); reweight by
    ``2 / (3 S p)``. Tree edges whose copies were all dropped keep one copy,
    so H stays connected.
    """
    rng = as_generator(rng)
    n, m = G.n, G.m
    if not G.is_connected():
        raise Disconnected("cut sparsifier needs a connected graph")
    factor = 2.0**16 / float(G.w.min()) if m else 1.0
    wi = np.maximum(np.round(G.w * factor), 1.0)

    tree_idx = max_weight_spanning_tree_edges(G.with_weights(wi)) if m else np.zeros(0, np.int64)
    ln = math.log(max(n, 2))
    S = max(1, math.ceil(c_scale * ln * ln))
    if target_density is None:
        p = min(1.0, c_rho * ln / S)
    else:
        p = float(target_density)
        if not 0 < p <= 1:
            raise ValueError("target_density must lie in (0, 1]")

    in_tree = np.zeros(m, dtype=bool)
    in_tree[tree_idx] = True
    copies = np.where(in_tree, rng.binomial(S, p, size=m), (rng.random(m) < p).astype(np.int64))
    copies = np.where(in_tree & (copies == 0), 1, copies)
    keep = copies > 0
    w_out = copies[keep] * wi[keep] * (2.0 / (3.0 * S * p)) / factor
    H = WeightedGraph(n, G.u[keep], G.v[keep], w_out)
    expected = (n - 1) + p * (m - (n - 1))
    return CutApproxResult(H, 3.0 * S, p, S, factor, tree_idx, expected)


def fast_low_stretch_tree(G: WeightedGraph, rng=None, **cut_kwargs) -> SpanningTree:
    """Low-stretch tree computed on a cut sparsifier of G, reported with G's weights."""
    rng = as_generator(rng)
    if G.m == G.n - 1 and G.is_connected():
        return SpanningTree.from_graph(G)
    res = incremental_cut_sparsifier(G, rng=child(rng, "cut"), **cut_kwargs)
    T_h = low_stretch_tree(res.H, rng=child(rng, "lst"))
    return restore_weights(T_h, G)
