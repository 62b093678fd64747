"""Weighted undirected (multi)graphs with Laplacian semantics."""

from __future__ import annotations

import warnings
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

from .errors import DimensionMismatch, NonPositiveWeight, VertexOutOfRange


class WeightedGraph:
    """Immutable edge-list graph on vertices ``0..n-1``.

    Edges are stored canonically: ``u < v`` and sorted by ``(u, v)``, ties
    (parallel edges) kept in input order. Every per-edge array in the package
    (stretches, resistances, sampling weights) is indexed in this order.
    """

    __slots__ = ("n", "u", "v", "w", "dropped_self_loops", "_cache")

    def __init__(self, n: int, u, v, w, dropped_self_loops: int = 0):
        # callers go through from_arrays/build_graph; arrays are assumed canonical
        self.n = int(n)
        self.u = np.asarray(u, dtype=np.int64)
        self.v = np.asarray(v, dtype=np.int64)
        self.w = np.asarray(w, dtype=np.float64)
        for arr in (self.u, self.v, self.w):
            arr.flags.writeable = False
        self.dropped_self_loops = int(dropped_self_loops)
        self._cache = {}

    @classmethod
    def from_arrays(cls, n, u, v, w, check: bool = True) -> "WeightedGraph":
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        w = np.asarray(w, dtype=np.float64).ravel()
        if not (len(u) == len(v) == len(w)):
            raise DimensionMismatch("edge arrays must have equal length")
        if check and len(u):
            if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
                raise VertexOutOfRange(f"vertex ids must lie in [0, {n})")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise NonPositiveWeight("edge weights must be positive and finite")
        loops = u == v
        n_loops = int(loops.sum())
        if n_loops:
            keep = ~loops
            u, v, w = u[keep], v[keep], w[keep]
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        order = np.lexsort((hi, lo))
        return cls(n, lo[order], hi[order], w[order], dropped_self_loops=n_loops)

    # basic shape -------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.w)

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )

    __hash__ = None

    def edges(self) -> Iterable[tuple[int, int, float]]:
        return zip(self.u.tolist(), self.v.tolist(), self.w.tolist())

    @property
    def total_weight(self) -> float:
        return float(self.w.sum())

    def edge_keys(self) -> np.ndarray:
        """Integer key ``u*n + v`` per edge; sorted because edges are canonical."""
        return self.u * self.n + self.v

    def is_unweighted(self) -> bool:
        return bool(np.all(self.w == 1.0))

    # derived graphs ------------------------------------------------------------

    def with_weights(self, w) -> "WeightedGraph":
        w = np.asarray(w, dtype=np.float64)
        if w.shape != self.w.shape:
            raise DimensionMismatch("weight vector has wrong length")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise NonPositiveWeight("edge weights must be positive and finite")
        return WeightedGraph(self.n, self.u, self.v, w)

    def scaled(self, factor: float) -> "WeightedGraph":
        return self.with_weights(self.w * float(factor))

    def subgraph(self, mask) -> "WeightedGraph":
        """Edges selected by a boolean mask or index array (order preserved)."""
        idx = np.asarray(mask)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        idx = np.sort(idx)
        return WeightedGraph(self.n, self.u[idx], self.v[idx], self.w[idx])

    def merge_parallel(self) -> "WeightedGraph":
        """Collapse parallel edges by summing weights; the Laplacian is unchanged."""
        if self.m == 0:
            return self
        keys = self.edge_keys()
        first = np.ones(self.m, dtype=bool)
        first[1:] = keys[1:] != keys[:-1]
        if first.all():
            return self
        group = np.cumsum(first) - 1
        w = np.bincount(group, weights=self.w)
        return WeightedGraph(self.n, self.u[first], self.v[first], w)

    # linear algebra ------------------------------------------------------------

    def incidence(self) -> sp.csr_matrix:
        """Signed m x n incidence matrix B with row ``e`` equal to chi_u - chi_v."""
        B = self._cache.get("B")
        if B is None:
            rows = np.repeat(np.arange(self.m), 2)
            cols = np.column_stack([self.u, self.v]).ravel()
            vals = np.tile([1.0, -1.0], self.m)
            B = sp.csr_matrix((vals, (rows, cols)), shape=(self.m, self.n))
            self._cache["B"] = B
        return B

    def laplacian(self) -> sp.csr_matrix:
        L = self._cache.get("L")
        if L is None:
            B = self.incidence()
            L = (B.T @ sp.diags(self.w) @ B).tocsr()
            L.sum_duplicates()
            self._cache["L"] = L
        return L

    def weighted_degrees(self) -> np.ndarray:
        return np.bincount(self.u, weights=self.w, minlength=self.n) + np.bincount(
            self.v, weights=self.w, minlength=self.n
        )

    def _check_vec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"vector has length {x.shape[0]}, graph has n={self.n}")
        return x

    def apply_laplacian(self, x) -> np.ndarray:
        """L_G x, accumulated edge by edge. Accepts a vector or an n x k block."""
        x = self._check_vec(x)
        if x.ndim == 1:
            flow = self.w * (x[self.u] - x[self.v])
            return np.bincount(self.u, weights=flow, minlength=self.n) - np.bincount(
                self.v, weights=flow, minlength=self.n
            )
        B = self.incidence()
        return B.T @ (self.w[:, None] * (B @ x))

    def quadratic_form(self, x):
        """``x^T L x``; a float for a vector, one value per column for an n x k block."""
        x = self._check_vec(x)
        d = x[self.u] - x[self.v]
        if d.ndim == 1:
            return float(np.dot(self.w, d * d))
        return self.w @ (d * d)

    def adjacency(self):
        """CSR adjacency ``(indptr, nbr, eid)`` listing both directions of each edge."""
        adj = self._cache.get("adj")
        if adj is None:
            src = np.concatenate([self.u, self.v])
            dst = np.concatenate([self.v, self.u])
            eid = np.concatenate([np.arange(self.m), np.arange(self.m)])
            order = np.lexsort((eid, src))
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
            adj = (indptr, dst[order], eid[order])
            self._cache["adj"] = adj
        return adj

    def n_components(self) -> int:
        if self.n == 0:
            return 0
        A = sp.csr_matrix((np.ones(self.m), (self.u, self.v)), shape=(self.n, self.n))
        return int(_cc(A, directed=False)[0])

    def is_connected(self) -> bool:
        return self.n_components() <= 1


def build_graph(n: int, raw_edges) -> WeightedGraph:
    """Validate and canonicalize a raw ``(u, v, w)`` edge list.

    Self-loops contribute nothing to the Laplacian, so they are dropped; the
    number dropped is kept on ``graph.dropped_self_loops``.
    """
    raw = list(raw_edges)
    for i, e in enumerate(raw):
        a, b, wt = e
        if not (0 <= a < n and 0 <= b < n):
            raise VertexOutOfRange(f"edge {i} = ({a}, {b}) has a vertex outside [0, {n})")
        if not wt > 0 or not np.isfinite(wt):
            raise NonPositiveWeight(f"edge {i} = ({a}, {b}) has weight {wt}")
    if raw:
        arr = np.array(raw, dtype=np.float64)
        g = WeightedGraph.from_arrays(n, arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2], check=False)
    else:
        g = WeightedGraph(n, [], [], [])
    if g.dropped_self_loops:
        warnings.warn(f"dropped {g.dropped_self_loops} self-loop(s)", stacklevel=2)
    return g


def apply_laplacian(G: WeightedGraph, x) -> np.ndarray:
    return G.apply_laplacian(x)


def quadratic_form(G: WeightedGraph, x) -> float:
    return G.quadratic_form(x)


def connected_components(G: WeightedGraph) -> list[set[int]]:
    """Vertex sets of the connected components, ordered by smallest vertex."""
    if G.n == 0:
        return []
    A = sp.csr_matrix((np.ones(G.m), (G.u, G.v)), shape=(G.n, G.n))
    _, labels = _cc(A, directed=False)
    comps: dict[int, set[int]] = {}
    for vtx, lab in enumerate(labels.tolist()):
        comps.setdefault(lab, set()).add(vtx)
    return sorted(comps.values(), key=min)


def union(*graphs: WeightedGraph) -> WeightedGraph:
    """Edge-list sum of graphs on the same vertex set (parallel edges kept)."""
    n = graphs[0].n
    return WeightedGraph.from_arrays(
        n,
        np.concatenate([g.u for g in graphs]),
        np.concatenate([g.v for g in graphs]),
        np.concatenate([g.w for g in graphs]),
        check=False,
    )
