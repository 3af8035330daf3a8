"""Probabilistic queries against a summary.

A summary induces a random-graph model: each node pair is an independent
edge with the density between its groups (same-group pairs get the
small-population correction n_i/(n_i - 1) so expected intra-group edge
counts come out right).  Queries below evaluate that model without ever
sampling from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graph import Graph
from .summary import Summary

__all__ = ["TriangleEstimate", "pair_probability", "expected_triangles",
           "triangles_triple_sum_oracle", "exact_triangles"]

_ORACLE_LIMIT = 1500


@dataclass(frozen=True)
class TriangleEstimate:
    expected: float
    method: str


def _pair_matrix(summary: Summary) -> np.ndarray:
    """Group-level edge probabilities: off-diagonal densities as-is, the
    diagonal rescaled by n_i/(n_i - 1) (zero for singleton groups), all
    clamped to [0, 1]."""
    sizes = summary.membership.sizes.astype(np.float64)
    pi = summary.density.copy()
    correction = np.where(sizes >= 2.0, sizes / np.maximum(sizes - 1.0, 1.0),
                          0.0)
    np.fill_diagonal(pi, np.diag(summary.density) * correction)
    return np.clip(pi, 0.0, 1.0)


def pair_probability(summary: Summary, u: int, v: int) -> float:
    """Edge probability between two distinct nodes under the summary's
    model."""
    if u == v:
        raise ParameterError("pair probability requires two distinct nodes")
    n = summary.membership.n
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError("node index out of range")
    a = summary.membership.assign
    return float(_pair_matrix(summary)[a[u], a[v]])


def expected_triangles(summary: Summary) -> TriangleEstimate:
    """Expected triangle count of the summary's model, in closed form.

    Sums, over unordered node triples, the product of the three pair
    probabilities.  Grouping triples by which supernodes host them reduces
    the sum to O(k^3): the fully mixed part is a trace of the cube of the
    size-weighted probability matrix, corrected for coincident-group
    patterns by inclusion-exclusion, plus the two-group and one-group
    terms counted directly.
    """
    sizes = summary.membership.sizes.astype(np.float64)
    pi = _pair_matrix(summary)
    diag = np.diag(pi)

    choose2 = sizes * (sizes - 1.0) / 2.0
    choose3 = sizes * (sizes - 1.0) * (sizes - 2.0) / 6.0

    # All three nodes in one group.
    total = float(np.sum(choose3 * diag**3))

    # Exactly two groups: two nodes in i, one in j (and the mirror image).
    off = pi.copy()
    np.fill_diagonal(off, 0.0)
    pair_w = off**2
    total += float(np.sum(pair_w * (choose2 * diag)[:, None] * sizes[None, :]))

    # Three distinct groups, via inclusion-exclusion on the unrestricted
    # cyclic sum s_all = sum_{i,j,w} n_i n_j n_w pi_ij pi_jw pi_wi.
    weighted = sizes[:, None] * pi
    s_all = float(np.trace(weighted @ weighted @ weighted))
    s_pair = float(np.sum(sizes**2 * diag * np.sum(sizes[None, :] * pi**2,
                                                   axis=1)))
    s_triple = float(np.sum(sizes**3 * diag**3))
    total += (s_all - 3.0 * s_pair + 2.0 * s_triple) / 6.0

    return TriangleEstimate(expected=total, method="closed-form")


def triangles_triple_sum_oracle(summary: Summary) -> float:
    """Same expectation by brute force over node triples.

    Materializes the n x n pair-probability matrix, so it refuses large
    summaries; it exists to cross-check the closed form.
    """
    n = summary.membership.n
    if n > _ORACLE_LIMIT:
        raise ParameterError(f"oracle limited to n <= {_ORACLE_LIMIT}")
    a = summary.membership.assign
    pi = _pair_matrix(summary)
    p = pi[np.ix_(a, a)]
    np.fill_diagonal(p, 0.0)
    # With a zero diagonal and symmetry, tr(P^3)/6 is exactly the sum of
    # p_uv p_vw p_wu over unordered triples of distinct nodes.
    return float(np.sum((p @ p) * p)) / 6.0


def exact_triangles(graph: Graph) -> int:
    """Triangle count of the graph itself.

    For each edge (u, v) with u < v, counts common neighbors greater than
    v by intersecting the two sorted adjacency lists, so each triangle is
    seen exactly once at its lowest edge.
    """
    total = 0
    for u, v in graph.edge_pairs():
        common = np.intersect1d(graph.neighbors(u), graph.neighbors(v),
                                assume_unique=True)
        total += int(np.count_nonzero(common > v))
    return total
