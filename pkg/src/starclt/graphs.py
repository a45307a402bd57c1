"""Rooted graphs, BFS distances, distance-k graphs and graph products.

Graphs are stored in CSR form (``indptr``/``indices`` with sorted neighbour
blocks), which is the per-vertex sorted adjacency list flattened into two
arrays. Instances are immutable.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .errors import (
    MalformedLineError,
    PreconditionError,
    RootOutOfRangeError,
    SelfLoopError,
    SizeCapError,
    VertexOutOfRangeError,
)

#: Sentinel distance for unreachable vertices.
INFINITE = np.iinfo(np.int64).max

#: Default vertex cap for cartesian products.
CARTESIAN_CAP = 1 << 20


@dataclass(frozen=True, eq=False)
class RootedGraph:
    """Simple undirected graph with a distinguished root vertex."""

    indptr: np.ndarray
    indices: np.ndarray
    root: int

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, root: int = 0) -> "RootedGraph":
        n = int(n)
        if n < 1:
            raise PreconditionError("a graph needs at least one vertex")
        if not 0 <= root < n:
            raise PreconditionError(f"root {root} out of range for n={n}")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise PreconditionError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise PreconditionError("self-loops are not allowed")
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return cls._from_coo(n, rows, cols, root)

    @classmethod
    def _from_coo(cls, n, rows, cols, root):
        m = sp.csr_matrix((np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(n, n))
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.indptr.astype(np.int64), m.indices.astype(np.int64), int(root))

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array of ``u < v`` pairs in lexicographic order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def edges(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edge_array()]

    def edge_set(self) -> frozenset:
        return frozenset(self.edges())

    def adjacency_matrix(self, dtype=np.int64) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=dtype)
        return sp.csr_matrix((data, self.indices.copy(), self.indptr.copy()),
                             shape=(self.n, self.n))

    def with_root(self, root: int) -> "RootedGraph":
        if not 0 <= root < self.n:
            raise PreconditionError(f"root {root} out of range for n={self.n}")
        return RootedGraph(self.indptr.copy(), self.indices.copy(), int(root))

    def __eq__(self, other):
        if not isinstance(other, RootedGraph):
            return NotImplemented
        return (self.root == other.root
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.root, self.indptr.tobytes(), self.indices.tobytes()))

    def __repr__(self):
        return f"RootedGraph(n={self.n}, edges={self.num_edges}, root={self.root})"


# -- text format -------------------------------------------------------------

def _int_token(tok, lineno, line):
    try:
        value = int(tok)
    except ValueError:
        raise MalformedLineError(lineno, f"expected an integer, got {tok!r}: {line!r}") from None
    if value < 0:
        raise MalformedLineError(lineno, f"negative index {value}")
    return value


def parse_graph(text: str) -> RootedGraph:
    """Parse the ``v``/``root``/``e`` rooted-graph text format.

    Duplicate edges are collapsed. Every error names the offending line.
    """
    n = root = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]
        if n is None:
            if key != "v" or len(tokens) != 2:
                raise MalformedLineError(lineno, "first declaration must be 'v <n>'")
            n = _int_token(tokens[1], lineno, line)
            if n < 1:
                raise MalformedLineError(lineno, "vertex count must be positive")
        elif root is None:
            if key != "root" or len(tokens) != 2:
                raise MalformedLineError(lineno, "second declaration must be 'root <r>'")
            root = _int_token(tokens[1], lineno, line)
            if root >= n:
                raise RootOutOfRangeError(lineno, f"root {root} >= vertex count {n}")
        else:
            if key != "e" or len(tokens) != 3:
                raise MalformedLineError(lineno, f"expected 'e <u> <v>', got {line!r}")
            u = _int_token(tokens[1], lineno, line)
            v = _int_token(tokens[2], lineno, line)
            if u >= n or v >= n:
                raise VertexOutOfRangeError(lineno, f"vertex {max(u, v)} >= vertex count {n}")
            if u == v:
                raise SelfLoopError(lineno, f"self-loop at vertex {u}")
            edges.append((u, v))
    if n is None:
        raise MalformedLineError(0, "missing 'v <n>' declaration")
    if root is None:
        raise MalformedLineError(0, "missing 'root <r>' declaration")
    return RootedGraph.from_edges(n, edges, root)


def format_graph(g: RootedGraph) -> str:
    lines = [f"v {g.n}", f"root {g.root}"]
    lines.extend(f"e {u} {v}" for u, v in g.edge_array())
    return "\n".join(lines) + "\n"


def read_graph(path) -> RootedGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(g: RootedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))


# -- distances ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DistanceVector:
    source: int
    dist: np.ndarray

    def reachable(self) -> np.ndarray:
        return self.dist != INFINITE

    def at(self, d: int) -> np.ndarray:
        """Vertices at distance exactly ``d``."""
        return np.flatnonzero(self.dist == d)


def bfs_distances(g: RootedGraph, source: int, max_depth: int | None = None) -> DistanceVector:
    """Breadth-first distances from ``source``.

    With ``max_depth`` the search stops expanding past that depth; farther
    vertices are reported as ``INFINITE``.
    """
    if not 0 <= source < g.n:
        raise PreconditionError(f"source {source} out of range for n={g.n}")
    dist = np.full(g.n, INFINITE, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    indptr, indices = g.indptr, g.indices
    while queue:
        u = queue.popleft()
        du = dist[u]
        if max_depth is not None and du >= max_depth:
            continue
        for w in indices[indptr[u]:indptr[u + 1]]:
            if dist[w] == INFINITE:
                dist[w] = du + 1
                queue.append(w)
    return DistanceVector(source, dist)


def is_connected(g: RootedGraph) -> bool:
    return bool(np.all(bfs_distances(g, g.root).reachable()))


def distance_k_graph(g: RootedGraph, k: int, *, chunk: int = 2048) -> RootedGraph:
    """Graph on the same vertices joining pairs at distance exactly ``k``.

    Runs a BFS from every source truncated at depth ``k``. Sources are
    processed in blocks, each block advancing its frontiers together as a
    sparse boolean matrix.
    """
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    if k == 1:
        return g
    n = g.n
    A = g.adjacency_matrix(np.int32)
    rows, cols = [], []
    for start in range(0, n, chunk):
        src = np.arange(start, min(n, start + chunk))
        b = len(src)
        frontier = sp.csr_matrix((np.ones(b, dtype=np.int32), (np.arange(b), src)), shape=(b, n))
        visited = frontier.copy()
        for _ in range(k):
            step = frontier @ A
            step.data[:] = 1
            step = step - step.multiply(visited)
            step.eliminate_zeros()
            frontier = step.tocsr()
            if frontier.nnz == 0:
                break
            visited = visited + frontier
        if frontier.nnz:
            fr = frontier.tocoo()
            rows.append(fr.row + start)
            cols.append(fr.col)
    if rows:
        rows, cols = np.concatenate(rows), np.concatenate(cols)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    return RootedGraph._from_coo(n, rows, cols, g.root)


# -- star products -----------------------------------------------------------

def _nonroot_order(g: RootedGraph) -> np.ndarray:
    """Local index of each vertex once the root is moved to the front."""
    local = np.empty(g.n, dtype=np.int64)
    others = np.array([v for v in range(g.n) if v != g.root], dtype=np.int64)
    local[g.root] = 0
    local[others] = np.arange(1, g.n)
    return local


def _glue(graphs: list[RootedGraph]) -> RootedGraph:
    # no connectivity check: also used on distance-k graphs
    parts = []
    offset = 1
    for g in graphs:
        local = _nonroot_order(g)
        mapping = np.where(local == 0, 0, local - 1 + offset)
        parts.append(mapping[g.edge_array()])
        offset += g.n - 1
    edges = np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)
    return RootedGraph.from_edges(offset, edges, 0)


def star_product(g1: RootedGraph, g2: RootedGraph) -> RootedGraph:
    """Glue two rooted graphs at their roots.

    The glued root becomes vertex 0, followed by the non-root vertices of
    ``g1`` and then those of ``g2``, each in increasing original order.
    """
    return _glue([g1, g2])


def star_power(g: RootedGraph, N: int) -> RootedGraph:
    """``N``-fold star power with copy-major indexing.

    Copy ``c`` (0-based) occupies indices ``1 + c*(n-1)`` to ``(c+1)*(n-1)``.
    """
    if N < 1:
        raise PreconditionError("N must be a positive integer")
    if g.n < 2:
        raise PreconditionError("star power needs a graph with at least two vertices")
    if not is_connected(g):
        raise PreconditionError("star power needs a connected graph")
    return _star_power_unchecked(g, N)


def _star_power_unchecked(g: RootedGraph, N: int) -> RootedGraph:
    local = _nonroot_order(g)
    e = local[g.edge_array()]
    blocks = []
    for c in range(N):
        shifted = np.where(e == 0, 0, e + c * (g.n - 1))
        blocks.append(shifted)
    edges = np.concatenate(blocks) if blocks else np.zeros((0, 2), dtype=np.int64)
    return RootedGraph.from_edges(N * (g.n - 1) + 1, edges, 0)


def copy_of(v: int, n_base: int) -> int | None:
    """Copy index of star-power vertex ``v``; ``None`` for the shared root."""
    return None if v == 0 else (v - 1) // (n_base - 1)


def base_vertex(v: int, g: RootedGraph) -> int:
    """Vertex of ``g`` that star-power vertex ``v`` is a copy of."""
    if v == 0:
        return g.root
    j = (v - 1) % (g.n - 1)
    others = [u for u in range(g.n) if u != g.root]
    return others[j]


# -- cartesian products ------------------------------------------------------

def cartesian_product(g1: RootedGraph, g2: RootedGraph, *, cap: int = CARTESIAN_CAP) -> RootedGraph:
    """Cartesian product on ``V1 x V2``, vertex ``(u1, u2)`` at index ``u1*n2 + u2``."""
    n1, n2 = g1.n, g2.n
    if n1 * n2 > cap:
        raise SizeCapError(f"cartesian product has {n1 * n2} vertices, cap is {cap}")
    e1, e2 = g1.edge_array(), g2.edge_array()
    # u1 fixed, edge in g2
    a = (np.arange(n1)[:, None, None] * n2 + e2[None, :, :]).reshape(-1, 2)
    # u2 fixed, edge in g1
    b = (e1[None, :, :] * n2 + np.arange(n2)[:, None, None]).reshape(-1, 2)
    return RootedGraph.from_edges(n1 * n2, np.concatenate([a, b]), g1.root * n2 + g2.root)


def cartesian_power(g: RootedGraph, N: int, *, cap: int = CARTESIAN_CAP) -> RootedGraph:
    if N < 1:
        raise PreconditionError("N must be a positive integer")
    if g.n ** N > cap:
        raise SizeCapError(f"cartesian power has {g.n ** N} vertices, cap is {cap}")
    out = g
    for _ in range(N - 1):
        out = cartesian_product(out, g, cap=cap)
    return out


# -- decomposition of the distance-k graph of a star power ------------------

@dataclass(frozen=True)
class EdgeDecomposition:
    star_power_edges: frozenset
    cross_edges: frozenset

    @property
    def all_edges(self) -> frozenset:
        return self.star_power_edges | self.cross_edges


def decompose_star_distance_k(g: RootedGraph, N: int, k: int) -> EdgeDecomposition:
    """Split the edges of the distance-k graph of ``g``'s star power by copy.

    Edges with both ends in one copy (the root belongs to every copy) form the
    star power of the distance-k graph of ``g``; the rest join vertices of
    different copies.
    """
    gk = distance_k_graph(g, k)
    if gk.num_edges == 0:
        raise PreconditionError(f"distance-{k} graph of the base graph has no edges")
    big = distance_k_graph(star_power(g, N), k)
    within, cross = set(), set()
    for u, v in big.edges():
        cu, cv = copy_of(u, g.n), copy_of(v, g.n)
        if cu is None or cv is None or cu == cv:
            within.add((u, v))
        else:
            cross.add((u, v))
    return EdgeDecomposition(frozenset(within), frozenset(cross))


# -- small constructors used by tests, docs and the CLI ----------------------

def path_graph(n: int, root: int = 0) -> RootedGraph:
    return RootedGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)], root)


def cycle_graph(n: int, root: int = 0) -> RootedGraph:
    return RootedGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], root)


def complete_graph(n: int, root: int = 0) -> RootedGraph:
    return RootedGraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], root)


def star_graph(N: int) -> RootedGraph:
    """``K_{1,N}`` rooted at its centre."""
    return RootedGraph.from_edges(N + 1, [(0, i) for i in range(1, N + 1)], 0)


def hypercube(N: int) -> RootedGraph:
    return cartesian_power(complete_graph(2), N)


def single_vertex() -> RootedGraph:
    return RootedGraph.from_edges(1, [], 0)
