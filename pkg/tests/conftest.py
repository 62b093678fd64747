import itertools

import numpy as np
import pytest

from specsparse.generators import gnp
from specsparse.graph import WeightedGraph


def random_graph(seed, n=None, p=None, weighted=True):
    rng = np.random.default_rng(seed)
    n = n if n is not None else int(rng.integers(6, 40))
    p = p if p is not None else float(rng.uniform(0.15, 0.6))
    return gnp(n, p, rng=rng, weights=(0.5, 5.0) if weighted else None)


def random_tree_of(G, seed):
    """A uniformly-shuffled Kruskal spanning tree of G (not low-stretch)."""
    from specsparse.trees import SpanningTree, spanning_forest_edges

    rng = np.random.default_rng(seed)
    idx = np.array(spanning_forest_edges(G.n, G.u, G.v, rng.permutation(G.m)))
    return SpanningTree.from_edges(G.n, G.u[idx], G.v[idx], G.w[idx])


def brute_cuts(n):
    """Every proper cut as a frozenset, vertex n-1 on the complement side."""
    for r in range(1, n):
        for S in itertools.combinations(range(n - 1), r):
            yield frozenset(S)
    yield from ()


def cut_cap(G: WeightedGraph, S) -> float:
    return sum(w for a, b, w in G.edges() if (a in S) != (b in S))


@pytest.fixture
def triangle():
    return WeightedGraph.from_arrays(3, [0, 1, 0], [1, 2, 2], [1.0, 1.0, 1.0])
