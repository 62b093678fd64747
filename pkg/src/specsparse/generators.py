"""Small graph families used by tests, the CLI ``bench`` command and examples."""

from __future__ import annotations

import numpy as np

from .graph import WeightedGraph
from .rng import as_generator


def path(n: int, w=1.0) -> WeightedGraph:
    u = np.arange(n - 1)
    return WeightedGraph.from_arrays(n, u, u + 1, np.broadcast_to(np.asarray(w, float), (n - 1,)))


def cycle(n: int) -> WeightedGraph:
    u = np.arange(n)
    return WeightedGraph.from_arrays(n, u, (u + 1) % n, np.ones(n))


def complete(n: int) -> WeightedGraph:
    u, v = np.triu_indices(n, 1)
    return WeightedGraph.from_arrays(n, u, v, np.ones(len(u)))


def star(k: int) -> WeightedGraph:
    """K_{1,k} with center 0."""
    return WeightedGraph.from_arrays(k + 1, np.zeros(k, int), np.arange(1, k + 1), np.ones(k))


def grid(rows: int, cols: int) -> WeightedGraph:
    idx = np.arange(rows * cols).reshape(rows, cols)
    u = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    v = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return WeightedGraph.from_arrays(rows * cols, u, v, np.ones(len(u)))


def two_cliques(k: int) -> WeightedGraph:
    """Two copies of K_k joined by a single bridge (k-1, k)."""
    a, b = np.triu_indices(k, 1)
    u = np.concatenate([a, a + k, [k - 1]])
    v = np.concatenate([b, b + k, [k]])
    return WeightedGraph.from_arrays(2 * k, u, v, np.ones(len(u)))


def gnp(n: int, p: float, rng=None, weights=None, connected: bool = True, max_tries: int = 100) -> WeightedGraph:
    """Erdos-Renyi G(n, p), resampled until connected when ``connected``.

    ``weights`` is None for unit weights or a ``(low, high)`` pair for
    uniform random weights.
    """
    rng = as_generator(rng)
    iu, iv = np.triu_indices(n, 1)
    for _ in range(max_tries):
        keep = rng.random(len(iu)) < p
        u, v = iu[keep], iv[keep]
        if weights is None:
            w = np.ones(len(u))
        else:
            w = rng.uniform(weights[0], weights[1], size=len(u))
        g = WeightedGraph.from_arrays(n, u, v, w)
        if not connected or g.is_connected():
            return g
    raise RuntimeError(f"G({n}, {p}) stayed disconnected after {max_tries} tries")


def random_sparse(n: int, m: int, rng=None, weights=None) -> WeightedGraph:
    """Connected random graph with about ``m`` edges: a random tree plus uniform extra edges.

    Scales to large ``n`` (no n^2 enumeration); used by the benchmark.
    """
    rng = as_generator(rng)
    perm = rng.permutation(n)
    parents = perm[(rng.random(n - 1) * np.arange(1, n)).astype(np.int64)]
    tu, tv = parents, perm[1:]
    extra = max(m - (n - 1), 0)
    eu = rng.integers(0, n, size=extra)
    ev = rng.integers(0, n, size=extra)
    u = np.concatenate([tu, eu])
    v = np.concatenate([tv, ev])
    if weights is None:
        w = np.ones(len(u))
    else:
        w = rng.uniform(weights[0], weights[1], size=len(u))
    return WeightedGraph.from_arrays(n, u, v, w).merge_parallel()
