"""
Weighted graph container, edge-list I/O and hop-distance statistics.

Nodes are dense integer indices ``0..n-1``; the original labels from an
edge-list file are kept in ``Graph.labels`` so results can be written back
with the caller's names. Self-loops are never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.sparse.csgraph import shortest_path


class GraphFormatError(ValueError):
    """Raised for unparseable edge-list input."""


@dataclass
class Graph:
    """Node-indexed weighted edge structure.

    ``edges`` maps ordered pairs ``(i, j)`` with ``i != j`` to weights. For an
    undirected graph both orientations are stored with the same weight.
    """

    n: int
    directed: bool = False
    edges: Dict[Tuple[int, int], float] = field(default_factory=dict)
    dropped_loops: int = 0
    labels: Optional[List[str]] = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be non-negative")
        if self.labels is None:
            self.labels = [str(i) for i in range(self.n)]
        if len(self.labels) != self.n:
            raise ValueError("labels must have one entry per node")

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[Sequence], directed: bool = False,
                   labels: Optional[List[str]] = None) -> "Graph":
        """Build a graph from ``(u, v)`` or ``(u, v, w)`` index tuples.

        Self-loops are dropped and counted.
        """
        g = cls(n=n, directed=directed, labels=labels)
        for rec in pairs:
            u, v = int(rec[0]), int(rec[1])
            w = float(rec[2]) if len(rec) > 2 else 1.0
            g.set_edge(u, v, w)
        return g

    @classmethod
    def from_adjacency(cls, a: np.ndarray, directed: bool = False) -> "Graph":
        """Graph from a dense weight matrix; zero entries and the diagonal are skipped."""
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if not directed and not np.allclose(a, a.T):
            raise ValueError("undirected adjacency must be symmetric")
        g = cls(n=a.shape[0], directed=directed)
        rows, cols = np.nonzero(a)
        for i, j in zip(rows.tolist(), cols.tolist()):
            if i != j:
                g.edges[(i, j)] = float(a[i, j])
        return g

    def set_edge(self, u: int, v: int, w: float = 1.0) -> None:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise IndexError(f"edge ({u}, {v}) out of range for n={self.n}")
        if not math.isfinite(w):
            raise ValueError(f"non-finite weight {w!r} on edge ({u}, {v})")
        if u == v:
            self.dropped_loops += 1
            return
        self.edges[(u, v)] = float(w)
        if not self.directed:
            self.edges[(v, u)] = float(w)

    def weight(self, u: int, v: int) -> float:
        return self.edges.get((u, v), 0.0)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    @property
    def edge_count(self) -> int:
        """Number of stored edges (undirected pairs counted once)."""
        if self.directed:
            return len(self.edges)
        return len(self.edges) // 2

    def unique_edges(self) -> List[Tuple[int, int, float]]:
        """Edges in lexicographic order; undirected pairs once with ``i < j``."""
        out = [(i, j, w) for (i, j), w in self.edges.items() if self.directed or i < j]
        out.sort()
        return out

    def adjacency(self) -> np.ndarray:
        """Dense ``n x n`` weight matrix with zero diagonal."""
        a = np.zeros((self.n, self.n))
        if self.edges:
            idx = np.array(list(self.edges.keys()), dtype=np.int64)
            a[idx[:, 0], idx[:, 1]] = list(self.edges.values())
        return a

    def neighbors(self, u: int) -> List[int]:
        """Sorted neighbor indices, direction ignored."""
        nb = {j for (i, j) in self.edges if i == u} | {i for (i, j) in self.edges if j == u}
        return sorted(nb)

    def _hop_matrix(self) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.n, self.n))
        idx = np.array(list(self.edges.keys()), dtype=np.int64)
        data = np.ones(len(idx))
        m = csr_matrix((data, (idx[:, 0], idx[:, 1])), shape=(self.n, self.n))
        # weak connectivity: symmetrize the pattern
        return ((m + m.T) > 0).astype(float)


def load_edge_list(text: str, directed: bool = False) -> Graph:
    """Parse an edge-list document.

    Each non-empty line that does not start with ``#`` holds ``u v`` or
    ``u v w``. Labels are mapped to dense indices in order of first appearance.
    """
    index: Dict[str, int] = {}
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"line {lineno}: expected 'u v' or 'u v w', got {raw!r}")
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: weight {parts[2]!r} is not a number") from None
            if not math.isfinite(w):
                raise GraphFormatError(f"line {lineno}: non-finite weight {parts[2]!r}")
        else:
            w = 1.0
        for lab in parts[:2]:
            if lab not in index:
                index[lab] = len(index)
        records.append((index[parts[0]], index[parts[1]], w))
    return Graph.from_edges(len(index), records, directed=directed, labels=list(index))


def save_edge_list(g: Graph) -> str:
    """Serialize as ``u<TAB>v<TAB>w`` lines; undirected pairs written once."""
    lines = [f"{g.labels[i]}\t{g.labels[j]}\t{w!r}" for i, j, w in g.unique_edges()]
    return "".join(line + "\n" for line in lines)


def degrees(g: Graph) -> Tuple[np.ndarray, np.ndarray]:
    """Out- and in-strength vectors (row and column sums of the weight matrix)."""
    out_s = np.zeros(g.n)
    in_s = np.zeros(g.n)
    for (i, j), w in g.edges.items():
        out_s[i] += w
        in_s[j] += w
    return out_s, in_s


def connected_components(g: Graph) -> Tuple[np.ndarray, List[int]]:
    """Weak components.

    Returns
    -------
    labels : ndarray of int
        Component id per node; id 0 is the largest component.
    sizes : list of int
        Component sizes, sorted descending.
    """
    if g.n == 0:
        return np.zeros(0, dtype=int), []
    _, raw = _cc(g._hop_matrix(), directed=False)
    counts = np.bincount(raw)
    # rank by size descending, then by first node for stable ids
    first = np.array([np.flatnonzero(raw == c)[0] for c in range(len(counts))])
    order = sorted(range(len(counts)), key=lambda c: (-counts[c], first[c]))
    remap = np.empty(len(counts), dtype=int)
    remap[order] = np.arange(len(counts))
    return remap[raw], [int(counts[c]) for c in order]


@dataclass(frozen=True)
class DistanceReport:
    component_size: int
    avg_distance: float
    max_distance: int


def distance_metrics(g: Graph) -> DistanceReport:
    """Hop-count statistics inside the largest weakly connected component.

    The average runs over unordered distinct pairs. Weights and direction are
    ignored.
    """
    if g.n == 0:
        return DistanceReport(0, 0.0, 0)
    labels, sizes = connected_components(g)
    nodes = np.flatnonzero(labels == 0)
    if len(nodes) < 2:
        return DistanceReport(len(nodes), 0.0, 0)
    sub = g._hop_matrix()[nodes][:, nodes]
    dist = shortest_path(sub, method="D", directed=False, unweighted=True)
    iu = np.triu_indices(len(nodes), k=1)
    pair = dist[iu]
    return DistanceReport(len(nodes), float(pair.mean()), int(pair.max()))


# Zachary (1977) karate club, 0-based, 78 undirected edges.
_KARATE_EDGES = (
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10),
    (0, 11), (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31), (1, 2),
    (1, 3), (1, 7), (1, 13), (1, 17), (1, 19), (1, 21), (1, 30), (2, 3),
    (2, 7), (2, 8), (2, 9), (2, 13), (2, 27), (2, 28), (2, 32), (3, 7),
    (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16), (6, 16),
    (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33),
    (15, 32), (15, 33), (18, 32), (18, 33), (19, 33), (20, 32), (20, 33),
    (22, 32), (22, 33), (23, 25), (23, 27), (23, 29), (23, 32), (23, 33),
    (24, 25), (24, 27), (24, 31), (25, 31), (26, 29), (26, 33), (27, 33),
    (28, 31), (28, 33), (29, 32), (29, 33), (30, 32), (30, 33), (31, 32),
    (31, 33), (32, 33),
)


def karate_club() -> Graph:
    """Zachary's karate club as an undirected unit-weight graph on 34 nodes."""
    return Graph.from_edges(34, _KARATE_EDGES)
