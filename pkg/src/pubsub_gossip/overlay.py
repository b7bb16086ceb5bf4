"""Random overlays from a target degree sequence (erased configuration model)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import InfeasibleSequence, ParseError

MAX_PASSES = 100


@dataclass(frozen=True, eq=False)
class OverlayGraph:
    """Undirected simple graph in CSR form, node ids 0..n-1.

    ``indices[indptr[u]:indptr[u+1]]`` is the sorted neighbour list of u.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    discarded_stubs: int = 0

    def __post_init__(self):
        for name in ("indptr", "indices"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edges(cls, n: int, edges, discarded_stubs: int = 0) -> "OverlayGraph":
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loop")
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if src.size and np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
            raise ValueError("parallel edge")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst, discarded_stubs)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(u).tolist() for u in range(self.n)]

    def edges(self) -> list[tuple[int, int]]:
        """Each undirected edge once as (u, v) with u < v, ascending."""
        out = []
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    out.append((u, int(v)))
        return out

    def to_sparse(self) -> sparse.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __eq__(self, other):
        if not isinstance(other, OverlayGraph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self):
        return f"OverlayGraph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True)
class ConstructionReport:
    seed: int | None
    n: int
    edges: int
    discarded_stubs: int
    giant_component_size: int

    FIELDS = ("seed", "n", "edges", "discarded_stubs", "giant_component_size")

    def as_row(self) -> list:
        return ["" if self.seed is None else self.seed, self.n, self.edges,
                self.discarded_stubs, self.giant_component_size]


def configuration_model(degrees, rng: np.random.Generator,
                        max_passes: int = MAX_PASSES) -> OverlayGraph:
    """Pair degree stubs uniformly at random into a simple graph.

    Each pass shuffles the pending stubs and pairs them in order; pairs that
    would make a self-loop or repeat an edge go back to the pending pool.
    Stubs still pending after ``max_passes`` passes are dropped and counted
    in ``discarded_stubs``.
    """
    deg = np.asarray(degrees, dtype=np.int64)
    n = deg.size
    if n == 0:
        return OverlayGraph.from_edges(0, [])
    if deg.min() < 0:
        raise InfeasibleSequence("negative degree")
    if deg.sum() % 2:
        raise InfeasibleSequence("degree sum is odd")
    if deg.max() >= n:
        raise InfeasibleSequence(f"max degree {deg.max()} >= n={n}")

    stubs = np.repeat(np.arange(n, dtype=np.int64), deg)
    edges: set[tuple[int, int]] = set()
    for _ in range(max_passes):
        if stubs.size == 0:
            break
        rng.shuffle(stubs)
        pending = []
        for u, v in stubs.reshape(-1, 2).tolist():
            if u > v:
                u, v = v, u
            if u == v or (u, v) in edges:
                pending.append(u)
                pending.append(v)
            else:
                edges.add((u, v))
        stubs = np.asarray(pending, dtype=np.int64)
    return OverlayGraph.from_edges(n, sorted(edges), discarded_stubs=int(stubs.size))


def component_labels(graph: OverlayGraph) -> np.ndarray:
    _, labels = csgraph.connected_components(graph.to_sparse(), directed=False)
    return labels


def giant_component(graph: OverlayGraph) -> tuple[int, np.ndarray]:
    """Size and membership mask of the largest component.

    Ties go to the component holding the lowest node id.
    """
    if graph.n == 0:
        return 0, np.zeros(0, dtype=bool)
    labels = component_labels(graph)
    sizes = np.bincount(labels)
    # first node of each label, in node order
    _, first = np.unique(labels, return_index=True)
    best = min(range(sizes.size), key=lambda c: (-sizes[c], first[c]))
    return int(sizes[best]), labels == best


def global_clustering(graph: OverlayGraph) -> float:
    """Transitivity: 3 * triangles / connected triples."""
    a = graph.to_sparse().astype(np.float64)
    closed = float((a @ a).multiply(a).sum())  # 6 * triangles
    d = graph.degrees.astype(np.float64)
    triples = float(np.sum(d * (d - 1)))  # 2 * connected triples
    return closed / triples if triples else 0.0


def construction_report(graph: OverlayGraph, seed=None) -> ConstructionReport:
    size, _ = giant_component(graph)
    return ConstructionReport(seed, graph.n, graph.num_edges, graph.discarded_stubs, size)


def write_edge_list(graph: OverlayGraph, sink) -> None:
    sink.write(f"# n {graph.n}\n")
    for u, v in graph.edges():
        sink.write(f"{u} {v}\n")


def read_edge_list(source) -> OverlayGraph:
    n = None
    edges = []
    seen = set()
    for lineno, line in enumerate(source, 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            parts = s[1:].split()
            if len(parts) == 2 and parts[0] == "n":
                try:
                    n = int(parts[1])
                except ValueError:
                    raise ParseError(f"bad node count {parts[1]!r}", lineno) from None
            continue
        parts = s.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'u v', got {s!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {s!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError("negative node id", lineno)
        if u == v:
            raise ParseError("self-loop", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError("duplicate edge", lineno)
        if n is not None and key[1] >= n:
            raise ParseError(f"node id {key[1]} >= n={n}", lineno)
        seen.add(key)
        edges.append(key)
    if n is None:
        n = 1 + max((v for _, v in edges), default=-1)
    return OverlayGraph.from_edges(n, edges)
