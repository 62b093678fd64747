"""Laplacian solvers: exact tree solves, preconditioned CG, Chebyshev, dense.

A handle prepared by :func:`prepare_solver` returns ``x`` with
``||x - L^+ b||_L <= delta * ||L^+ b||_L``. Right-hand sides are projected
onto the complement of the all-ones vector before solving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DenseTooLarge, DimensionMismatch, Disconnected, MaxIterationsExceeded
from .graph import WeightedGraph
from .rng import as_generator
from .trees import SpanningTree, _preorder, compute_stretches, tree_edges_in

DENSE_LIMIT = 2000
METHODS = ("pcg-tree", "pcg-incremental", "dense")

# safety factor between the requested delta and the stopping threshold
THETA = 0.5
# delay (in iterations) of the energy-norm error estimate
ESTIMATE_DELAY = 5


def _project(b):
    return b - b.mean(axis=0)


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------


def _tree_factor(T: SpanningTree):
    """Preorder data for the tree solve, cached on the tree."""
    f = T._cache.get("sweep")
    if f is None:
        n = T.n
        tin, size = _preorder(T)
        ends = tin + size
        # ends collide (several subtrees can close at the same position), so
        # the subtraction side is a sparse (n + 1) x n matrix
        close = sp.csr_matrix((np.ones(n), (ends, np.arange(n))), shape=(n + 1, n))
        inv_w = np.zeros(n)
        c = T.order[1:]
        inv_w[c] = 1.0 / T.parent_weight[c]
        f = T._cache["sweep"] = (tin, ends, close, inv_w)
    return f


def solve_tree(T: SpanningTree, b) -> np.ndarray:
    """Exact ``L_T^+ b`` by a leaf-to-root flow sweep and a root-to-leaf potential sweep.

    In DFS preorder every subtree is a contiguous range, so the flow on the
    edge above x (the demand inside x's subtree) is a difference of prefix
    sums, and the potential of x (the sum of flow / weight over its root
    path) is a prefix sum of range updates. Both sweeps are O(n) per column.
    Accepts a vector or an ``n x k`` block. ``b`` is projected first; the
    result is orthogonal to the all-ones vector.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != T.n:
        raise DimensionMismatch(f"right-hand side has length {b.shape[0]}, tree has n={T.n}")
    if T.n == 1:
        return np.zeros_like(b)
    tin, ends, close, inv_w = _tree_factor(T)
    vec = b.ndim == 1
    bp = _project(b)
    if vec:
        bp = bp[:, None]
    k = bp.shape[1]
    pre = np.zeros((T.n + 1, k))
    pre[tin + 1] = bp
    np.cumsum(pre, axis=0, out=pre)
    g = (pre[ends] - pre[tin]) * inv_w[:, None]  # flow / weight on the edge above x
    d = -(close @ g)
    d[tin] += g
    pot = np.cumsum(d[:-1], axis=0)[tin]
    x = _project(pot)
    return x[:, 0] if vec else x


# ---------------------------------------------------------------------------
# handle
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolverHandle:
    graph: WeightedGraph
    method: str
    delta: float
    max_iterations: int
    preconditioner: str
    mode: str = "adaptive"
    condition_bound: float = 1.0
    tree: SpanningTree | None = None
    cheb_bounds: tuple | None = None
    cheb_iterations: int = 0
    _apply_prec: object = field(default=None, repr=False)
    _dense: object = field(default=None, repr=False)


@dataclass
class SolveInfo:
    iterations: int
    error_estimate: float
    projected: bool


class _GroundedFactor:
    """Sparse LU of a Laplacian with the last vertex grounded."""

    def __init__(self, G: WeightedGraph):
        n = G.n
        self.n = n
        L = G.laplacian().tocsc()
        self.lu = spla.splu(L[: n - 1, : n - 1].tocsc()) if n > 1 else None

    def __call__(self, r):
        if self.n == 1:
            return np.zeros_like(r)
        x = np.zeros_like(r)
        x[:-1] = self.lu.solve(np.ascontiguousarray(r[:-1]))
        return _project(x)


def _prepare_dense(G):
    n = G.n
    if n > DENSE_LIMIT:
        raise DenseTooLarge(f"dense solver limited to n <= {DENSE_LIMIT}, got {n}")
    if n == 1:
        return None
    L = G.laplacian().toarray()
    return sla.cho_factor(L[:-1, :-1], lower=True)


def _dense_solve(fac, b):
    x = np.zeros_like(b)
    if fac is not None:
        x[:-1] = sla.cho_solve(fac, b[:-1])
    return _project(x)


def _incremental_preconditioner(G, T, rng):
    """One-level chain: incremental sparsifier of G + kappa T, factored directly."""
    from .pipelines import incremental_spectral_sparsifier

    st = compute_stretches(G, T)
    idx = tree_edges_in(G, T)
    off = np.ones(G.m, dtype=bool)
    off[idx] = False
    st_off = float(st[off].sum())
    m_off = int(off.sum())
    if m_off == 0:
        return G, 1.0
    # aim for about m / ln n off-tree samples
    target = max(G.n, G.m / max(math.log(G.n), 1.0))
    kappa = max(1.0, 36.0 * st_off * math.log(max(G.n, 3)) / target)
    _, I = incremental_spectral_sparsifier(G, idx, st, kappa, rng=rng)
    return I, 2.0 * (1.0 + kappa)


def _lanczos_extremes(apply_A, apply_M, n, steps, rng):
    """Extreme Ritz values of M^{-1} A from a short preconditioned Lanczos run."""
    r = _project(rng.standard_normal(n))
    z = apply_M(r)
    p = z.copy()
    gamma = float(r @ z)
    alphas, betas = [], []
    for _ in range(steps):
        q = apply_A(p)
        pq = float(p @ q)
        if pq <= 0 or gamma <= 0:
            break
        a = gamma / pq
        r = r - a * q
        z = apply_M(r)
        g_new = float(r @ z)
        alphas.append(a)
        beta = g_new / gamma
        betas.append(beta)
        if g_new <= 1e-28 * abs(gamma):
            break
        p = z + beta * p
        gamma = g_new
    k = len(alphas)
    if k == 0:
        return 1.0, 1.0
    d = np.empty(k)
    e = np.empty(max(k - 1, 0))
    d[0] = 1.0 / alphas[0]
    for j in range(1, k):
        d[j] = 1.0 / alphas[j] + betas[j - 1] / alphas[j - 1]
        e[j - 1] = math.sqrt(max(betas[j - 1], 0.0)) / alphas[j - 1]
    ev = sla.eigvalsh_tridiagonal(d, e) if k > 1 else d
    return float(ev.min()), float(ev.max())


def prepare_solver(
    G: WeightedGraph,
    delta: float = 0.1,
    method: str = "pcg-tree",
    *,
    tree: SpanningTree | None = None,
    mode: str = "adaptive",
    max_iterations: int | None = None,
    rng=None,
) -> SolverHandle:
    """Prepare an approximate inverse of ``L_G`` with relative L-norm tolerance ``delta``.

    ``tree`` overrides the low-stretch tree used by ``pcg-tree`` (it must be a
    subgraph of G with matching weights for the condition bound to hold).
    ``mode="chebyshev"`` fixes the iteration count and coefficients up front so
    the handle applies one fixed symmetric operator.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if method not in METHODS:
        raise ValueError(f"unknown solver method {method!r}; choose from {METHODS}")
    if mode not in ("adaptive", "chebyshev"):
        raise ValueError(f"unknown mode {mode!r}")
    if not G.is_connected():
        raise Disconnected("solver needs a connected graph")
    rng = as_generator(rng)

    if method == "dense":
        fac = _prepare_dense(G)
        return SolverHandle(G, method, float(delta), 1, "cholesky (grounded)", mode="direct", _dense=fac)

    if method == "pcg-tree":
        if tree is None:
            from .lst import low_stretch_tree

            tree = low_stretch_tree(G, rng=rng)
        cond = max(1.0, float(compute_stretches(G, tree).sum()) if G.m else 1.0)
        prec = lambda r, _t=tree: solve_tree(_t, r)  # noqa: E731
        desc = f"tree (stretch {cond:.6g})"
        lo_rigorous = True
    else:
        from .lst import low_stretch_tree

        tree = low_stretch_tree(G, rng=rng) if tree is None else tree
        I, cond = _incremental_preconditioner(G, tree, rng)
        prec = _GroundedFactor(I)
        desc = f"incremental sparsifier ({I.m} edges, factored)"
        lo_rigorous = False

    if max_iterations is None:
        max_iterations = int(10 * math.sqrt(cond)) + 200

    bounds, k_cheb = None, 0
    if mode == "chebyshev":
        L = G.laplacian()
        steps = min(G.n, 80)
        lo, hi = _lanczos_extremes(lambda x: L @ x, prec, G.n, steps, rng)
        # Ritz values sit inside the spectrum; widen before fixing coefficients
        lo = 1.0 if lo_rigorous else lo / 1.5
        hi = min(hi * 1.3, cond * 1.01) if lo_rigorous else hi * 1.3
        hi = max(hi, lo * 1.0001)
        s = math.sqrt(hi / lo)
        rho = (s - 1.0) / (s + 1.0)
        if rho <= 0:
            k_cheb = 1
        else:
            k_cheb = max(1, math.ceil(math.log(2.0 / (THETA * delta)) / -math.log(rho)))
        bounds = (lo, hi)

    return SolverHandle(
        G,
        method,
        float(delta),
        int(max_iterations),
        desc,
        mode=mode,
        condition_bound=cond,
        tree=tree,
        cheb_bounds=bounds,
        cheb_iterations=k_cheb,
        _apply_prec=prec,
    )


# ---------------------------------------------------------------------------
# iterations
# ---------------------------------------------------------------------------


def _pcg(L, prec, B, delta, max_iter):
    X = np.zeros_like(B)
    R = B.copy()
    Z = prec(R)
    P = Z.copy()
    gamma = np.einsum("ij,ij->j", R, Z)
    g0 = gamma.copy()
    hist = []
    tol2 = (THETA * delta) ** 2
    est = np.full(B.shape[1], np.inf)
    for it in range(1, max_iter + 1):
        Q = L @ P
        pq = np.einsum("ij,ij->j", P, Q)
        ok = pq > 0
        alpha = np.where(ok, gamma / np.where(ok, pq, 1.0), 0.0)
        X += alpha * P
        R -= alpha * Q
        hist.append(alpha * gamma)  # ||x_{j+1} - x_j||_L^2
        if len(hist) > ESTIMATE_DELAY:
            hist.pop(0)
        Z = prec(R)
        g_new = np.einsum("ij,ij->j", R, Z)
        xnorm2 = np.einsum("ij,ij->j", B, X)
        est = np.sqrt(np.sum(hist, axis=0) / np.maximum(xnorm2, 1e-300))
        exact = g_new <= 1e-30 * np.maximum(g0, 1e-300)
        done = exact | ((len(hist) == ESTIMATE_DELAY) & (est * est <= tol2)) | (g0 == 0)
        if done.all():
            return X, it, float(np.max(np.where(exact | (g0 == 0), 0.0, est)))
        okg = gamma > 0
        beta = np.where(okg, g_new / np.where(okg, gamma, 1.0), 0.0)
        P = Z + beta * P
        gamma = g_new
    raise MaxIterationsExceeded(
        f"PCG did not reach delta={delta} in {max_iter} iterations",
        residual=float(np.max(est)),
        iterations=max_iter,
    )


def _chebyshev(L, prec, B, bounds, k):
    """Preconditioned Chebyshev iteration with fixed bounds and step count."""
    lo, hi = bounds
    d = (hi + lo) / 2.0
    c = (hi - lo) / 2.0
    X = np.zeros_like(B)
    R = B.copy()
    P = None
    alpha = 0.0
    for i in range(k):
        Z = prec(R)
        if i == 0:
            P = Z.copy()
            alpha = 1.0 / d
        else:
            beta = (c * alpha / 2.0) ** 2 if i > 1 else 0.5 * (c / d) ** 2
            alpha = 1.0 / (d - beta / alpha)
            P = Z + beta * P
        X += alpha * P
        R -= alpha * (L @ P)
    return X


def solve(handle: SolverHandle, b, return_info: bool = False):
    """Apply the prepared approximate inverse to a vector or an ``n x k`` block."""
    G = handle.graph
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != G.n:
        raise DimensionMismatch(f"right-hand side has length {b.shape[0]}, graph has n={G.n}")
    scale = np.abs(b).max() if b.size else 0.0
    projected = bool(scale > 0 and np.abs(b.sum(axis=0)).max() > 1e-12 * scale * G.n)
    bp = _project(b)
    block = bp if bp.ndim == 2 else bp[:, None]

    if handle.method == "dense":
        X, its, est = _dense_solve(handle._dense, block), 1, 0.0
    elif handle.mode == "chebyshev":
        X = _project(_chebyshev(G.laplacian(), handle._apply_prec, block, handle.cheb_bounds, handle.cheb_iterations))
        its, est = handle.cheb_iterations, float("nan")
    else:
        X, its, est = _pcg(G.laplacian(), handle._apply_prec, block, handle.delta, handle.max_iterations)
        X = _project(X)

    x = X if bp.ndim == 2 else X[:, 0]
    if return_info:
        return x, SolveInfo(its, est, projected)
    return x
