"""Coupling graphs: lines, heavy-hex lattices and edge-list files."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ..errors import ParseError


@dataclass(frozen=True)
class CouplingGraph:
    num_nodes: int
    edges: frozenset[tuple[int, int]]
    name: str = "graph"

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < self.num_nodes and 0 <= b < self.num_nodes):
                raise ValueError(f"edge ({a}, {b}) outside {self.num_nodes} nodes")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.num_nodes < 1:
            raise ValueError("graph needs at least one node")
        if self.num_nodes > 1:
            n_comp, _ = connected_components(self._adjacency_matrix(), directed=False)
            if n_comp != 1:
                raise ValueError(f"coupling graph {self.name!r} is not connected")

    def _adjacency_matrix(self) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.num_nodes, self.num_nodes))
        a, b = np.array(sorted(self.edges)).T
        data = np.ones(len(a))
        return csr_matrix((np.r_[data, data], (np.r_[a, b], np.r_[b, a])),
                          shape=(self.num_nodes, self.num_nodes))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for a, b in sorted(self.edges):
            nbrs[a].append(b)
            nbrs[b].append(a)
        return tuple(tuple(sorted(n)) for n in nbrs)

    @cached_property
    def distances(self) -> np.ndarray:
        d = shortest_path(self._adjacency_matrix(), unweighted=True, directed=False)
        return d.astype(np.int64) if np.all(np.isfinite(d)) else d

    def neighbors(self, q: int) -> tuple[int, ...]:
        return self.adjacency[q]

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def distance(self, a: int, b: int) -> int:
        return int(self.distances[a, b])

    def degree(self, q: int) -> int:
        return len(self.adjacency[q])

    @property
    def max_degree(self) -> int:
        return max((len(n) for n in self.adjacency), default=0)

    def to_text(self) -> str:
        return f"# nodes {self.num_nodes}\n" + "".join(f"{a} {b}\n" for a, b in sorted(self.edges))


def line_graph(n: int) -> CouplingGraph:
    return CouplingGraph(n, frozenset((i, i + 1) for i in range(n - 1)), f"line{n}")


def parse_edge_list(text: str, num_nodes: int | None = None) -> CouplingGraph:
    """Edge-list text: one ``a b`` pair per line; ``# nodes N`` optionally fixes the node count."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            parts = stripped[1:].split()
            if len(parts) == 2 and parts[0] == "nodes" and num_nodes is None:
                num_nodes = int(parts[1])
            continue
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'a b', got {stripped!r}", lineno)
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(f"non-integer node in {stripped!r}", lineno) from None
    if not edges and num_nodes is None:
        raise ParseError("edge list is empty")
    if num_nodes is None:
        num_nodes = max(max(e) for e in edges) + 1
    try:
        return CouplingGraph(num_nodes, frozenset(edges), "edge-list")
    except ValueError as exc:
        raise ParseError(str(exc)) from None


class _HeavyHexLattice:
    """Rows of ``4 * cells + 3`` qubits joined by bridge qubits.

    Bridges between row ``r`` and ``r + 1`` sit at columns ``0 mod 4`` for
    even ``r`` and ``2 mod 4`` for odd ``r``. Degree-1 row ends of the first
    and last rows are dropped, which gives the 127-qubit layout for
    ``rows=7, cells=3``. Nodes are numbered row by row, each row's bridges
    directly after it.
    """

    def __init__(self, rows: int, cells: int):
        if rows < 1 or cells < 0:
            raise ValueError("heavy-hex needs rows >= 1 and cells >= 0")
        self.rows, self.length = rows, 4 * cells + 3
        L = self.length
        self.bridge_cols = [[c for c in range(L) if c % 4 == (0 if r % 2 == 0 else 2)]
                            for r in range(rows - 1)]
        present = {(r, c) for r in range(rows) for c in range(L)}
        if rows > 1:
            for r, end in ((0, L - 1), (0, 0), (rows - 1, 0), (rows - 1, L - 1)):
                bridged = ((r < rows - 1 and end in self.bridge_cols[r])
                           or (r > 0 and end in self.bridge_cols[r - 1]))
                if not bridged:
                    present.discard((r, end))
        self.index: dict[tuple, int] = {}
        k = 0
        for r in range(rows):
            for c in range(L):
                if (r, c) in present:
                    self.index[("row", r, c)] = k
                    k += 1
            if r < rows - 1:
                for c in self.bridge_cols[r]:
                    self.index[("bridge", r, c)] = k
                    k += 1
        self.num_nodes = k

    def edges(self) -> set[tuple[int, int]]:
        e = set()
        idx = self.index
        for r in range(self.rows):
            for c in range(self.length - 1):
                a, b = idx.get(("row", r, c)), idx.get(("row", r, c + 1))
                if a is not None and b is not None:
                    e.add((a, b))
            if r < self.rows - 1:
                for c in self.bridge_cols[r]:
                    m = idx[("bridge", r, c)]
                    e.add((idx[("row", r, c)], m))
                    e.add((m, idx[("row", r + 1, c)]))
        return e

    def snake(self) -> list[int]:
        """A long simple path: along a row, down a bridge, back along the next row."""
        idx, path = self.index, []
        col, direction = 0, 1
        for r in range(self.rows):
            if r < self.rows - 1:
                stop = max(self.bridge_cols[r]) if direction > 0 else min(self.bridge_cols[r])
            else:
                stop = self.length - 1 if direction > 0 else 0
            c = col
            while True:
                if ("row", r, c) in idx:
                    path.append(idx[("row", r, c)])
                if c == stop:
                    break
                c += direction
            if r < self.rows - 1:
                path.append(idx[("bridge", r, stop)])
                col, direction = stop, -direction
        return path


def heavy_hex_graph(rows: int = 7, cells: int = 3) -> CouplingGraph:
    """Heavy-hex lattice; the defaults give the 127-qubit device layout."""
    lat = _HeavyHexLattice(rows, cells)
    return CouplingGraph(lat.num_nodes, frozenset(lat.edges()), f"heavy_hex({rows},{cells})")


def heavy_hex_snake(rows: int = 7, cells: int = 3) -> list[int]:
    return _HeavyHexLattice(rows, cells).snake()
