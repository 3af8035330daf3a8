"""Independent oracles used across the test suite.

Everything here recomputes quantities the package produces, but by a
different route: dense matrices, brute-force enumeration, or literal
definition sums.  Slow on purpose; kept well away from production code.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from specsumm import Graph, Membership, Summary, build_summary
from specsumm.queries import _pair_matrix


def dense_objective(graph: Graph, z: np.ndarray) -> float:
    """tr((ZᵀAZ)²) straight from the dense adjacency."""
    m = z.T @ graph.to_dense() @ z
    return float(np.trace(m @ m))


def dense_lifted(summary: Summary) -> np.ndarray:
    """The full n×n reconstruction, one density lookup per node pair."""
    a = summary.membership.assign
    return summary.density[np.ix_(a, a)]


def dense_l2_loss(graph: Graph, summary: Summary) -> float:
    """Literal double sum of squared reconstruction errors over all ordered
    node pairs (diagonal included)."""
    diff = graph.to_dense() - dense_lifted(summary)
    return float(np.sum(diff * diff))


def fd_gradient(graph: Graph, z: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of the trace objective, entry by entry."""
    from specsumm import trace_objective_relaxed

    out = np.zeros_like(z, dtype=np.float64)
    for i in range(z.shape[0]):
        for j in range(z.shape[1]):
            zp = z.copy()
            zp[i, j] += h
            zm = z.copy()
            zm[i, j] -= h
            out[i, j] = (trace_objective_relaxed(graph, zp)
                         - trace_objective_relaxed(graph, zm)) / (2 * h)
    return out


def all_memberships(n: int, k: int):
    """Every assignment of n nodes to k labels that uses all k labels."""
    for labels in itertools.product(range(k), repeat=n):
        if len(set(labels)) == k:
            yield Membership(np.array(labels, dtype=np.int64), k)


def best_partition_objective(graph: Graph, k: int) -> float:
    """Exhaustive maximum of the integer objective over all k-partitions."""
    from specsumm import objective_integer

    return max(objective_integer(graph, m)
               for m in all_memberships(graph.node_count, k))


def best_single_move(graph: Graph, membership: Membership
                     ) -> tuple[float, tuple[int, int] | None]:
    """Best objective reachable by moving one node, by full recomputation.

    Returns (best objective, (node, target)) — the move is None when
    staying put is at least as good as every legal single move.
    """
    from specsumm import objective_integer

    best = objective_integer(graph, membership)
    move = None
    sizes = membership.sizes
    for node in range(membership.n):
        a = int(membership.assign[node])
        if sizes[a] == 1:
            continue
        for b in range(membership.k):
            if b == a:
                continue
            assign = membership.assign.copy()
            assign[node] = b
            value = objective_integer(graph, Membership(assign, membership.k))
            if value > best:
                best, move = value, (node, b)
    return best, move


def triangle_triple_loop(summary: Summary) -> float:
    """Expected triangles by literally iterating node triples."""
    n = summary.membership.n
    a = summary.membership.assign
    pi = _pair_matrix(summary)
    total = 0.0
    for u, v, w in itertools.combinations(range(n), 3):
        total += pi[a[u], a[v]] * pi[a[v], a[w]] * pi[a[w], a[u]]
    return total


def triangle_count_dense(graph: Graph) -> int:
    """tr(A³)/6 on the dense adjacency."""
    a = graph.to_dense()
    return int(round(np.trace(a @ a @ a) / 6.0))


def random_graph(rng: np.random.Generator, n: int, p: float = 0.3) -> Graph:
    """Erdős–Rényi sample with at least one edge (resamples until so)."""
    while True:
        iu = np.triu_indices(n, k=1)
        mask = rng.random(len(iu[0])) < p
        edges = list(zip(iu[0][mask].tolist(), iu[1][mask].tolist()))
        if edges:
            return Graph.from_edges(n, edges)


def random_membership(rng: np.random.Generator, n: int, k: int) -> Membership:
    """Uniform labels, patched so all k supernodes are inhabited."""
    assign = rng.integers(0, k, size=n)
    forced = rng.choice(n, size=k, replace=False)
    assign[forced] = np.arange(k)
    return Membership(assign.astype(np.int64), k)


def random_summary(rng: np.random.Generator, n: int, k: int
                   ) -> tuple[Graph, Summary]:
    graph = random_graph(rng, n)
    return graph, build_summary(graph, random_membership(rng, n, k))
