"""Simple undirected graphs in compressed sparse row form.

Ingestion (edge-list text), preprocessing (largest connected component),
synthetic benchmark generation (planted-partition random graphs), and the
small linear-algebra kernels the optimizers are built on.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import IO, Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import ParameterError, ParseError
from .rng import make_generator

__all__ = [
    "Graph",
    "NodeRelabeling",
    "load_edge_list",
    "write_edge_list",
    "largest_connected_component",
    "generate_sbm",
    "spmv",
    "adjacency_trace_sq",
]


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph.

    Attributes
    ----------
    node_count : int
        Number of nodes n (ids are dense, 0-based).
    edge_count : int
        Number of undirected edges m.
    indptr : int64 array, shape (n+1,)
        CSR row pointers into ``indices``.
    indices : int64 array, shape (2m,)
        Concatenated neighbor lists, sorted ascending within each row.
        Symmetric: v appears in row u iff u appears in row v.
    """

    node_count: int
    edge_count: int
    indptr: np.ndarray
    indices: np.ndarray

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from undirected edges over nodes [0, node_count).

        Duplicate edges are collapsed; self-loops are rejected.
        """
        if node_count < 1:
            raise ParameterError("node_count must be >= 1")
        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                           dtype=np.int64).reshape(-1, 2)
        if pairs.size:
            if pairs.min() < 0 or pairs.max() >= node_count:
                raise ParameterError("edge endpoint out of range")
            if np.any(pairs[:, 0] == pairs[:, 1]):
                raise ParameterError("self-loops are not allowed")
        return _from_canonical_pairs(node_count, _canonicalize(pairs))

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        """Sorted neighbor ids of node u (a read-only view)."""
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        pos = np.searchsorted(row, v)
        return pos < len(row) and row[pos] == v

    @cached_property
    def _csr(self) -> sp.csr_matrix:
        # Single shared float64 CSR backing for all matrix products; scipy's
        # kernel sums each row in index order, so results are thread-count
        # independent.
        n = self.node_count
        data = np.ones(len(self.indices), dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def adjacency_matmat(self, x: np.ndarray) -> np.ndarray:
        """A @ x for a vector or matrix with n rows."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.node_count:
            raise ValueError(
                f"operand has {x.shape[0]} rows, graph has {self.node_count} nodes")
        return self._csr @ x

    def to_dense(self) -> np.ndarray:
        """Dense n×n 0/1 adjacency matrix (test-scale graphs only)."""
        n = self.node_count
        a = np.zeros((n, n), dtype=np.float64)
        src = np.repeat(np.arange(n), self.degrees)
        a[src, self.indices] = 1.0
        return a

    def edge_pairs(self) -> np.ndarray:
        """All undirected edges as an (m, 2) array with u < v, lexicographic."""
        src = np.repeat(np.arange(self.node_count), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])


@dataclass(frozen=True)
class NodeRelabeling:
    """Bijection between retained original node ids and dense new ids.

    ``to_original[new_id]`` gives the original id; ``to_new`` maps the
    other way.
    """

    to_original: np.ndarray
    to_new: dict[int, int] = field(repr=False)

    @classmethod
    def from_kept_ids(cls, kept: np.ndarray) -> "NodeRelabeling":
        kept = np.asarray(kept, dtype=np.int64)
        return cls(to_original=kept,
                   to_new={int(orig): new for new, orig in enumerate(kept)})

    @classmethod
    def identity(cls, n: int) -> "NodeRelabeling":
        return cls.from_kept_ids(np.arange(n, dtype=np.int64))


def _canonicalize(pairs: np.ndarray) -> np.ndarray:
    """Unique undirected pairs in (min, max) form, lexicographically sorted."""
    if pairs.size == 0:
        return pairs.reshape(0, 2)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    return np.unique(np.column_stack([lo, hi]), axis=0)


def _from_canonical_pairs(n: int, pairs: np.ndarray) -> Graph:
    """Assemble CSR from unique (u < v) pairs."""
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(src, minlength=n))
    return Graph(node_count=n, edge_count=len(pairs),
                 indptr=indptr, indices=dst.astype(np.int64))


def _decode_lines(source: str | Path | IO) -> list[str]:
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.splitlines()


def load_edge_list(source: str | Path | IO, *, dedupe: bool = True,
                   drop_self_loops: bool = True) -> tuple[Graph, NodeRelabeling]:
    """Parse a whitespace-separated "u v" edge list into a Graph.

    Node ids are arbitrary non-negative integers and are relabeled densely
    to [0, n) in ascending original-id order; the relabeling is returned so
    results can be mapped back.  Lines starting with '#' or '%' are
    comments; blank lines are ignored.  With ``dedupe`` (default) repeated
    edges collapse to one, otherwise a repeat is an error; likewise
    ``drop_self_loops`` silently discards u-u lines rather than rejecting
    them.

    Raises
    ------
    ParseError
        On a malformed token (with its line number), on a duplicate or
        self-loop when the corresponding option forbids it, or when no
        edges remain ("empty graph").
    """
    us: list[int] = []
    vs: list[int] = []
    for lineno, raw in enumerate(_decode_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("%"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected two integers, got {len(tokens)} tokens", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"malformed integer in {tokens!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError("node ids must be non-negative", lineno)
        if u == v:
            if not drop_self_loops:
                raise ParseError(f"self-loop at node {u}", lineno)
            continue
        us.append(u)
        vs.append(v)

    if not us:
        raise ParseError("empty graph")

    pairs = np.column_stack([np.asarray(us, dtype=np.int64),
                             np.asarray(vs, dtype=np.int64)])
    canonical = _canonicalize(pairs)
    if not dedupe and len(canonical) != len(pairs):
        raise ParseError("duplicate edges present and dedupe is disabled")

    original_ids = np.unique(canonical)
    relabeling = NodeRelabeling.from_kept_ids(original_ids)
    dense = np.searchsorted(original_ids, canonical)
    return _from_canonical_pairs(len(original_ids), dense), relabeling


def write_edge_list(graph: Graph, target: str | Path | IO) -> None:
    """Serialize as one "u v" line per undirected edge (u < v, sorted)."""
    lines = "".join(f"{u} {v}\n" for u, v in graph.edge_pairs())
    if isinstance(target, (str, Path)):
        Path(target).write_text(lines, encoding="utf-8")
    elif isinstance(target, (io.RawIOBase, io.BufferedIOBase)):
        target.write(lines.encode("utf-8"))
    else:
        target.write(lines)


def largest_connected_component(graph: Graph) -> tuple[Graph, NodeRelabeling]:
    """Induced subgraph on the largest component, densely relabeled.

    Ties between equal-size components go to the one containing the
    smallest node id.
    """
    ncomp, labels = connected_components(graph._csr, directed=False)
    if ncomp == 1:
        return graph, NodeRelabeling.identity(graph.node_count)
    sizes = np.bincount(labels, minlength=ncomp)
    # np.unique scans ascending, so first_index[c] is the smallest node in c.
    comps, first_index = np.unique(labels, return_index=True)
    candidates = comps[sizes[comps] == sizes.max()]
    best = candidates[np.argmin(first_index[candidates])]

    kept = np.flatnonzero(labels == best)
    new_id = np.full(graph.node_count, -1, dtype=np.int64)
    new_id[kept] = np.arange(len(kept))
    pairs = graph.edge_pairs()
    mask = (new_id[pairs[:, 0]] >= 0) & (new_id[pairs[:, 1]] >= 0)
    sub = _from_canonical_pairs(len(kept), new_id[pairs[mask]])
    return sub, NodeRelabeling.from_kept_ids(kept)


def generate_sbm(blocks: int, block_size: int, p_in: float, p_out: float,
                 seed: int | None):
    """Sample a planted-partition random graph.

    Nodes are grouped into ``blocks`` consecutive blocks of ``block_size``;
    each unordered distinct pair is an edge independently with probability
    ``p_in`` inside a block and ``p_out`` across blocks.  Returns the graph
    together with the planted block membership.
    """
    from .summary import Membership  # deferred: summary imports this module

    if blocks < 1 or block_size < 1:
        raise ParameterError("blocks and block_size must be >= 1")
    if not (0.0 <= p_out <= p_in <= 1.0):
        raise ParameterError("need 0 <= p_out <= p_in <= 1")

    n = blocks * block_size
    iu, ju = np.triu_indices(n, k=1)
    same = (iu // block_size) == (ju // block_size)
    thresholds = np.where(same, p_in, p_out)
    draws = make_generator(seed).random(len(iu))
    keep = draws < thresholds
    graph = _from_canonical_pairs(n, np.column_stack([iu[keep], ju[keep]]))
    planted = Membership(np.arange(n, dtype=np.int64) // block_size, blocks)
    return graph, planted


def spmv(graph: Graph, x: np.ndarray) -> np.ndarray:
    """Adjacency matrix–vector product A·x."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (graph.node_count,):
        raise ValueError(f"vector length {x.shape} does not match n={graph.node_count}")
    return graph.adjacency_matmat(x)


def adjacency_trace_sq(graph: Graph) -> float:
    """tr(A²) for a simple undirected graph, which is exactly 2m."""
    return float(2 * graph.edge_count)
