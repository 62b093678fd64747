"""Spectral graph sparsification: effective-resistance sampling, low-stretch
trees, incremental sparsifiers and Laplacian solvers, with a dense oracle for
checking the guarantees on small graphs."""

from .config import Constants, RunConfig
from .eigen import EigenResult, fiedler, fiedler_normalized, inverse_power
from .graph import WeightedGraph, apply_laplacian, build_graph, connected_components, quadratic_form
from .lst import fast_low_stretch_tree, incremental_cut_sparsifier, low_stretch_tree
from .oracle import ApproxReport, cut_check, dense_eigen, pinv_dense, spectral_approx_check
from .pipelines import (
    SparsifierResult,
    build_spanner,
    incremental_spectral_sparsifier,
    leverage,
    sparsify,
    sparsify_chain,
    sparsify_general,
    sparsify_linear,
    sparsify_spine_heavy,
    sparsify_unweighted,
)
from .resistance import approx_resistances, build_sketch, exact_resistance
from .sampler import SamplingPlan, make_plan, oversample_sparsify, sample
from .solver import SolverHandle, prepare_solver, solve, solve_tree
from .trees import (
    SpanningTree,
    compute_stretches,
    max_weight_spanning_tree,
    scale_spine,
    stretch_via_cuts,
    tree_resistances,
)

__version__ = "0.1.0"
