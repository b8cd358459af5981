"""Graph snapshots, degree sequences and empirical degree CDFs."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _frozen(arr, dtype=np.int64):
    arr = np.ascontiguousarray(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


def canonical_edges(pairs):
    """Return unique undirected pairs as a sorted (E, 2) array with u < v.

    Self-loops are dropped.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    keep = lo != hi
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    out = np.unique(np.stack([lo, hi], axis=1), axis=0)
    return out


@dataclass(frozen=True, eq=False)
class SnapshotGraph:
    """A simple undirected graph for one time bucket.

    ``nodes`` is a sorted array of integer node ids and ``edges`` a sorted
    (E, 2) array of distinct pairs with ``u < v``. ``events`` is the raw
    interaction count before deduplication (equal to the edge count for
    generated graphs).
    """

    index: int
    nodes: np.ndarray
    edges: np.ndarray
    events: int = -1
    bucket: int | None = None

    def __post_init__(self):
        nodes = _frozen(np.unique(np.asarray(self.nodes, dtype=np.int64)))
        edges = canonical_edges(self.edges)
        if edges.size and not np.all(np.isin(edges, nodes)):
            raise ValueError("edge endpoint missing from node set")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", _frozen(edges))
        if self.events < 0:
            object.__setattr__(self, "events", len(edges))

    @classmethod
    def from_edges(cls, index, pairs, nodes=None, **kw):
        edges = canonical_edges(pairs)
        if nodes is None:
            nodes = np.unique(edges)
        else:
            nodes = np.union1d(np.asarray(nodes, dtype=np.int64), edges.ravel())
        return cls(index, nodes, edges, **kw)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def empty(self):
        """True for a bucket that received no interactions."""
        return self.n_edges == 0 and self.events == 0


@dataclass(frozen=True, eq=False)
class WindowGraph:
    start_index: int
    length: int
    graph: SnapshotGraph


def union_graph(snapshots, index=0):
    """Union of node and edge sets over ``snapshots``."""
    snapshots = list(snapshots)
    if len(snapshots) == 1:
        return snapshots[0]
    nodes = np.unique(np.concatenate([s.nodes for s in snapshots] or [np.empty(0, np.int64)]))
    edges = np.concatenate([s.edges for s in snapshots] or [np.empty((0, 2), np.int64)])
    edges = np.unique(edges, axis=0) if len(edges) else edges
    return SnapshotGraph(index, nodes, edges, events=sum(s.events for s in snapshots))


def window_graph(snapshots, start, length):
    if length < 1 or start < 0 or start + length > len(snapshots):
        raise IndexError(
            f"window [{start}, {start + length}) outside sequence of {len(snapshots)} snapshots"
        )
    return WindowGraph(start, length, union_graph(snapshots[start:start + length], index=start))


def degree_sequence(graph):
    """Degree of every node in ``graph`` (isolated nodes give 0), in node order."""
    if graph.n_nodes == 0:
        return np.empty(0, dtype=np.int64)
    pos = np.searchsorted(graph.nodes, graph.edges.ravel())
    return np.bincount(pos, minlength=graph.n_nodes).astype(np.int64)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Step CDF of an integer sample stored on its distinct values.

    ``cumcounts[k]`` is the number of observations ``<= support[k]``; the
    last entry equals ``total``. Keeping integer counts lets KS distances be
    computed with a single rounding.
    """

    support: np.ndarray
    cumcounts: np.ndarray
    total: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "support", _frozen(self.support))
        object.__setattr__(self, "cumcounts", _frozen(self.cumcounts))
        object.__setattr__(self, "total", int(self.cumcounts[-1]) if len(self.cumcounts) else 0)

    @property
    def cumulative(self):
        return self.cumcounts / self.total

    def counts_at(self, x):
        """Number of observations ``<= x`` for each value in ``x``."""
        idx = np.searchsorted(self.support, np.asarray(x), side="right")
        padded = np.concatenate([[0], self.cumcounts])
        return padded[idx]

    def __call__(self, x):
        return self.counts_at(x) / self.total

    def __len__(self):
        return len(self.support)


def empirical_cdf(degrees):
    degrees = np.asarray(degrees, dtype=np.int64).ravel()
    if degrees.size == 0:
        raise ValueError("empty degree sequence")
    support, counts = np.unique(degrees, return_counts=True)
    return EmpiricalCdf(support, np.cumsum(counts))
