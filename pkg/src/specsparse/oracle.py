"""Dense reference computations used to certify the fast code.

Everything here is O(n^3) or exponential and meant for small graphs only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DenseTooLarge, TooLargeForExhaustive, VertexSetMismatch
from .graph import WeightedGraph
from .rng import as_generator

DENSE_LIMIT = 2000
EXHAUSTIVE_LIMIT = 16
NULL_CUTOFF = 1e-9


def _guard(n):
    if n > DENSE_LIMIT:
        raise DenseTooLarge(f"dense oracle limited to n <= {DENSE_LIMIT}, got {n}")


def dense_laplacian(G: WeightedGraph) -> np.ndarray:
    _guard(G.n)
    return G.laplacian().toarray()


def dense_eigen(G: WeightedGraph, normalized: bool = False):
    """Ascending eigenvalues and eigenvectors of L (or of D^{-1/2} L D^{-1/2})."""
    L = dense_laplacian(G)
    if normalized:
        d = np.diag(L).copy()
        s = np.where(d > 0, 1.0 / np.sqrt(np.where(d > 0, d, 1.0)), 0.0)
        L = s[:, None] * L * s[None, :]
    return np.linalg.eigh(L)


def _range_basis(L):
    lam, U = np.linalg.eigh(L)
    keep = lam > NULL_CUTOFF * max(lam[-1], 1e-300)
    return lam[keep], U[:, keep]


def pinv_dense(G: WeightedGraph) -> np.ndarray:
    """Moore-Penrose pseudoinverse of L_G by eigendecomposition."""
    L = dense_laplacian(G)
    lam, U = _range_basis(L)
    return (U / lam) @ U.T


def exact_resistances(G: WeightedGraph, pairs=None) -> np.ndarray:
    """Effective resistances of the given pairs (default: every edge)."""
    P = pinv_dense(G)
    if pairs is None:
        a, b = G.u, G.v
    else:
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        a, b = pairs[:, 0], pairs[:, 1]
    return P[a, a] + P[b, b] - 2.0 * P[a, b]


def loewner_extremes(G: WeightedGraph, H: WeightedGraph) -> tuple[float, float]:
    """Smallest and largest ``x^T L_H x / x^T L_G x`` over x orthogonal to G's kernel."""
    if G.n != H.n:
        raise VertexSetMismatch(f"graphs have {G.n} and {H.n} vertices")
    lam, U = _range_basis(dense_laplacian(G))
    S = U / np.sqrt(lam)
    M = S.T @ dense_laplacian(H) @ S
    ev = np.linalg.eigvalsh((M + M.T) / 2.0)
    return float(ev[0]), float(ev[-1])


@dataclass
class ApproxReport:
    lambda_min_ratio: float
    lambda_max_ratio: float
    epsilon: float
    passed: bool
    n: int
    m_in: int
    m_out: int
    quick_min: float
    quick_max: float
    seed: int | None = None

    @property
    def pass_(self) -> bool:
        return self.passed


def spectral_approx_check(G: WeightedGraph, G_tilde: WeightedGraph, epsilon: float, seed=None, n_quick: int = 1000) -> ApproxReport:
    """Certify ``(1-eps) G <= G_tilde <= (1+eps) G`` via the extreme generalized eigenvalues.

    Also records the range of ``n_quick`` random Gaussian quadratic-form ratios,
    which always lies inside the certified interval.
    """
    if G.n != G_tilde.n:
        raise VertexSetMismatch(f"graphs have {G.n} and {G_tilde.n} vertices")
    _guard(G.n)
    rng = as_generator(seed)
    X = rng.standard_normal((G.n, n_quick))
    X -= X.mean(axis=0)
    qg = np.einsum("ij,ij->j", X, G.apply_laplacian(X))
    qh = np.einsum("ij,ij->j", X, G_tilde.apply_laplacian(X))
    ok = qg > 0
    ratios = qh[ok] / qg[ok] if ok.any() else np.ones(1)
    lo, hi = loewner_extremes(G, G_tilde)
    passed = bool(lo >= 1.0 - epsilon and hi <= 1.0 + epsilon)
    return ApproxReport(lo, hi, float(epsilon), passed, G.n, G.m, G_tilde.m, float(ratios.min()), float(ratios.max()), seed)


def cut_values(G: WeightedGraph, sides: np.ndarray) -> np.ndarray:
    """Cut capacities for a boolean ``(cuts, n)`` side-membership matrix."""
    cross = sides[:, G.u] != sides[:, G.v]
    return cross.astype(np.float64) @ G.w


def _all_cuts(n):
    # vertex n-1 always on the "false" side; skip the empty set
    codes = np.arange(1, 2 ** (n - 1), dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n - 1)) & 1
    return np.concatenate([bits.astype(bool), np.zeros((len(codes), 1), dtype=bool)], axis=1)


def cut_check(G: WeightedGraph, H: WeightedGraph, tau: float, rng=None, n_random: int = 100_000, rtol: float = 1e-12) -> bool:
    """True iff ``tau * cap_H(S) >= cap_G(S)`` for every proper cut S.

    Exhaustive for n <= 16. Larger graphs are checked on ``n_random`` random
    cuts, with a :class:`TooLargeForExhaustive` warning.
    """
    if G.n != H.n:
        raise VertexSetMismatch(f"graphs have {G.n} and {H.n} vertices")
    n = G.n
    if n < 2:
        return True
    if n <= EXHAUSTIVE_LIMIT:
        batches = [_all_cuts(n)]
    else:
        warnings.warn(
            TooLargeForExhaustive(f"n={n} exceeds {EXHAUSTIVE_LIMIT}; checking {n_random} random cuts only"),
            stacklevel=2,
        )
        rng = as_generator(rng)
        batches = []
        left = n_random
        while left > 0:
            b = min(left, 10_000)
            s = rng.random((b, n)) < 0.5
            s[:, -1] = False
            s = s[s.any(axis=1)]
            batches.append(s)
            left -= b
    scale = G.total_weight + tau * H.total_weight
    for s in batches:
        cg = cut_values(G, s)
        ch = cut_values(H, s)
        if np.any(tau * ch < cg - rtol * scale):
            return False
    return True
