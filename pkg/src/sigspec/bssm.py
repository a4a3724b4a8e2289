"""
Binary signal spectrum model.

Every node carries a 0/1 vector over ``m`` signal types and two nodes are
linked when their vectors share at least one unit. Random spectra give
networks with heavy-tailed degrees and short paths; conversely any simple
undirected graph is reproduced exactly by the membership matrix of an edge
clique cover.

Random draws use numpy's PCG64 bit generator seeded with the integer seed
given; ensemble member ``s`` uses seed ``seed + s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Set

import numpy as np

from .graph import Graph


def rng_for(seed: int) -> np.random.Generator:
    """The package-wide seeded stream: PCG64 on a non-negative integer seed."""
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass
class BinarySpectrum:
    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2:
            raise ValueError("spectrum must be a 2-d n x m array")
        if b.size and not np.isin(b, (0, 1)).all():
            raise ValueError("spectrum entries must be 0 or 1")
        self.bits = b.astype(np.uint8)

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def m(self) -> int:
        return self.bits.shape[1]


@dataclass
class CliqueCover:
    cliques: List[List[int]]

    def __len__(self) -> int:
        return len(self.cliques)


def generate_spectrum(n: int, m: int, p: float, seed: int = 0) -> BinarySpectrum:
    """Draw an ``n x m`` matrix of independent Bernoulli(p) bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p={p} outside [0, 1]")
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    u = rng_for(seed).random((n, m))
    return BinarySpectrum((u < p).astype(np.uint8))


def _shared(bits: np.ndarray) -> np.ndarray:
    b = bits.astype(np.int32)
    a = (b @ b.T) > 0
    np.fill_diagonal(a, False)
    return a


def induce_network(s: BinarySpectrum) -> Graph:
    """Undirected unit-weight graph linking nodes whose spectra overlap."""
    a = _shared(s.bits)
    rows, cols = np.nonzero(np.triu(a, k=1))
    return Graph.from_edges(s.n, zip(rows.tolist(), cols.tolist()))


def clique_cover(g: Graph) -> CliqueCover:
    """Greedy edge clique cover.

    Edges are scanned in lexicographic order. Each still-uncovered edge seeds a
    clique that grows by the common neighbour adding the most uncovered pairs
    (smallest index on ties) until no common neighbour is left. Edge weights
    are ignored; any stored edge counts.
    """
    if g.directed:
        raise ValueError("clique cover needs an undirected graph")
    adj: List[Set[int]] = [set() for _ in range(g.n)]
    for i, j in g.edges:
        adj[i].add(j)
    uncovered = {(i, j) for (i, j) in g.edges if i < j}
    cliques = []
    for i, j, _ in g.unique_edges():
        if (i, j) not in uncovered:
            continue
        clique = [i, j]
        common = adj[i] & adj[j]
        while common:
            best, best_gain = -1, -1
            for v in sorted(common):
                gain = sum((min(u, v), max(u, v)) in uncovered for u in clique)
                if gain > best_gain:
                    best, best_gain = v, gain
            clique.append(best)
            common &= adj[best]
            common.discard(best)
        for a_ in range(len(clique)):
            for b_ in range(a_ + 1, len(clique)):
                u, v = clique[a_], clique[b_]
                uncovered.discard((min(u, v), max(u, v)))
        cliques.append(sorted(clique))
    return CliqueCover(cliques)


def cover_to_spectrum(c: CliqueCover, n: int) -> BinarySpectrum:
    """Membership matrix: bit ``d`` of node ``j`` is set iff ``j`` is in clique ``d``."""
    bits = np.zeros((n, len(c.cliques)), dtype=np.uint8)
    for d, members in enumerate(c.cliques):
        for j in members:
            if not 0 <= j < n:
                raise IndexError(f"clique {d} references node {j}, n={n}")
            bits[j, d] = 1
    return BinarySpectrum(bits)


def verify_representation(s: BinarySpectrum, g: Graph) -> int:
    """Count unordered node pairs where the induced adjacency disagrees with ``g``."""
    if s.n != g.n:
        raise ValueError(f"spectrum has {s.n} rows, graph has {g.n} nodes")
    induced = _shared(s.bits)
    target = g.adjacency() != 0
    target = target | target.T
    return int(np.triu(induced != target, k=1).sum())


def is_clique_cover(c: CliqueCover, g: Graph) -> bool:
    """True when every set is a clique of ``g`` and together they cover every edge."""
    covered = set()
    for members in c.cliques:
        for a_ in range(len(members)):
            for b_ in range(a_ + 1, len(members)):
                u, v = members[a_], members[b_]
                if not g.has_edge(u, v):
                    return False
                covered.add((min(u, v), max(u, v)))
    return covered == {(i, j) for (i, j) in g.edges if i < j}


# -- file formats -----------------------------------------------------------

def spectrum_to_tsv(s: BinarySpectrum) -> str:
    return "".join("\t".join(str(int(x)) for x in row) + "\n" for row in s.bits)


def spectrum_from_tsv(text: str) -> BinarySpectrum:
    rows = [line.split("\t") for line in text.splitlines() if line.strip()]
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged spectrum rows")
    return BinarySpectrum(np.array([[int(x) for x in r] for r in rows], dtype=np.uint8).reshape(len(rows), -1))


def cover_to_text(c: CliqueCover) -> str:
    return "".join(" ".join(str(j) for j in members) + "\n" for members in c.cliques)


def cover_from_text(text: str) -> CliqueCover:
    return CliqueCover([[int(x) for x in line.split()] for line in text.splitlines() if line.strip()])


def cover_size_bound(g: Graph) -> int:
    """min(edge count, floor(n^2 / 4)): the cover size any graph admits."""
    return min(g.edge_count, g.n * g.n // 4)
