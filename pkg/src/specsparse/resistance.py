"""Effective resistances: exact pair queries and the random-projection sketch."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Disconnected
from .graph import WeightedGraph
from .rng import as_generator, child
from .solver import SolverHandle, prepare_solver, solve

DEFAULT_C_JL = 24.0
# target size (in doubles) of one block of right-hand sides
BLOCK_ENTRIES = 1 << 17


def _handle(G, solver, delta, rng):
    if isinstance(solver, SolverHandle):
        return solver
    return prepare_solver(G, delta, solver or "pcg-tree", rng=rng)


def exact_resistance(G: WeightedGraph, u: int, v: int, solver=None) -> float:
    """``(chi_u - chi_v)^T L^+ (chi_u - chi_v)``; exact when ``solver`` is dense (the default)."""
    if not G.is_connected():
        raise Disconnected("effective resistance needs a connected graph")
    if u == v:
        return 0.0
    h = solver if isinstance(solver, SolverHandle) else prepare_solver(G, 1e-10 if solver is None else 1e-6, solver or "dense")
    b = np.zeros(G.n)
    b[u], b[v] = 1.0, -1.0
    x = solve(h, b)
    return float(x[u] - x[v])


def sketch_dimension(n: int, epsilon_jl: float, c_jl: float = DEFAULT_C_JL) -> int:
    return max(1, math.ceil(c_jl * math.log(max(n, 2)) / (epsilon_jl * epsilon_jl)))


@dataclass(frozen=True, eq=False)
class ResistanceSketch:
    """``Z`` (k x n): sketched rows of ``W^{1/2} B`` pushed through the solver.

    ``mode`` is ``"jl"`` for a random +-1/sqrt(k) projection or ``"identity"``
    when every edge row is solved directly (no projection error).
    """

    Z: np.ndarray
    k: int
    epsilon_jl: float
    delta: float
    seed: int | None
    mode: str
    iterations: int = 0


def build_sketch(
    G: WeightedGraph,
    epsilon: float = 0.5,
    solver=None,
    *,
    jl: bool = True,
    c_jl: float = DEFAULT_C_JL,
    epsilon_jl: float | None = None,
    delta: float | None = None,
    seed: int | None = None,
    rng=None,
    block: int | None = None,
) -> ResistanceSketch:
    """Sketch for all-edge resistance estimates with relative accuracy ``epsilon``.

    Budget: ``epsilon/2`` to the projection, ``delta = epsilon/8`` to the solves.
    When the projection would need at least m rows, or ``jl=False``, every
    edge row is solved instead, which is exact up to solver error.
    ``solver`` may be a prepared handle, a method name, or None (tree PCG).
    Solves run ``block`` right-hand sides at a time; by default the block is
    sized so that one n x block panel stays cache-resident.
    """
    if not G.is_connected():
        raise Disconnected("resistance sketch needs a connected graph")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    eps_jl = epsilon / 2.0 if epsilon_jl is None else float(epsilon_jl)
    delta = epsilon / 8.0 if delta is None else float(delta)
    rng = as_generator(seed if rng is None else rng)
    m = G.m
    k = sketch_dimension(G.n, eps_jl, c_jl)
    sw = np.sqrt(G.w)

    if not jl or k >= m:
        mode, k = "identity", m
    else:
        mode = "jl"
    Bt = G.incidence().T.tocsr()

    def rows(s, e):
        # block of Y = Q W^{1/2} B, transposed to n x (e - s)
        if mode == "identity":
            C = np.zeros((m, e - s))
            C[np.arange(s, e), np.arange(e - s)] = sw[s:e]
        else:
            signs = rng.integers(0, 2, size=(e - s, m), dtype=np.int8)
            C = ((2.0 * signs - 1.0) * (sw / math.sqrt(k))).T
        return Bt @ C

    if block is None:
        block = min(256, max(8, BLOCK_ENTRIES // G.n))
    h = _handle(G, solver, delta, child(rng, "solver"))
    Z = np.empty((k, G.n))
    iters = 0
    for s in range(0, k, block):
        e = min(k, s + block)
        X, info = solve(h, rows(s, e), return_info=True)
        Z[s:e] = X.T
        iters = max(iters, info.iterations)
    return ResistanceSketch(Z, k, eps_jl, delta, seed, mode, iters)


def approx_resistances(sketch: ResistanceSketch, G: WeightedGraph, chunk: int = 1 << 22) -> np.ndarray:
    """``||Z (chi_u - chi_v)||^2`` for every edge of G, in edge order."""
    Z = sketch.Z
    k = Z.shape[0]
    out = np.empty(G.m)
    step = max(1, chunk // max(k, 1))
    for s in range(0, G.m, step):
        d = Z[:, G.u[s : s + step]] - Z[:, G.v[s : s + step]]
        out[s : s + step] = np.einsum("ij,ij->j", d, d)
    return out
