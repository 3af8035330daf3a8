"""Spectral graph summarization.

Compress a simple undirected graph into k supernodes whose pairwise edge
densities reconstruct the adjacency matrix with minimal squared error.
The pipeline embeds nodes with the largest-magnitude eigenvectors (or a
constrained-ascent refinement of a random basis), clusters the embedding
rows, and optionally polishes the grouping with greedy node moves.
"""

from .errors import ConvergenceError, ParameterError, ParseError
from .graph import (Graph, NodeRelabeling, adjacency_trace_sq, generate_sbm,
                    largest_connected_component, load_edge_list, spmv,
                    write_edge_list)
from .kmeans import KmeansConfig, kmeans_cost, kmeanspp_init, minibatch_kmeans
from .queries import (TriangleEstimate, exact_triangles, expected_triangles,
                      pair_probability, triangles_triple_sum_oracle)
from .spectral import EigenBasis, dense_eig_oracle, lm_eigs
from .stiefel import (AscentTrace, OcsaConfig, SkewDirection, cayley_step,
                      gradient, line_search, ocsa, orthonormality_defect,
                      random_orthonormal_init, skew_direction,
                      trace_objective_relaxed, trace_objective_split)
from .summary import (Membership, ReassignConfig, ReassignMove, Summary,
                      SummaryReport, build_summary, l2_loss, lifted_entry,
                      membership_to_normalized, objective_integer,
                      reassignment, specsumm, supernode_edge_counts)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "ParameterError", "ParseError",
    "Graph", "NodeRelabeling", "adjacency_trace_sq", "generate_sbm",
    "largest_connected_component", "load_edge_list", "spmv",
    "write_edge_list",
    "KmeansConfig", "kmeans_cost", "kmeanspp_init", "minibatch_kmeans",
    "TriangleEstimate", "exact_triangles", "expected_triangles",
    "pair_probability", "triangles_triple_sum_oracle",
    "EigenBasis", "dense_eig_oracle", "lm_eigs",
    "AscentTrace", "OcsaConfig", "SkewDirection", "cayley_step", "gradient",
    "line_search", "ocsa", "orthonormality_defect",
    "random_orthonormal_init", "skew_direction", "trace_objective_relaxed",
    "trace_objective_split",
    "Membership", "ReassignConfig", "ReassignMove", "Summary",
    "SummaryReport", "build_summary", "l2_loss", "lifted_entry",
    "membership_to_normalized", "objective_integer", "reassignment",
    "specsumm", "supernode_edge_counts",
    "__version__",
]
