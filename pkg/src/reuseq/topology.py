"""Physical coupling graphs, presets and subgraph embeddings."""

from __future__ import annotations

import json
import math
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import networkx as nx
import numpy as np

HEAVY_HEX_27_EDGES = (
    (0, 1), (1, 2), (2, 3), (3, 5), (1, 4), (4, 7), (5, 8), (6, 7), (7, 10), (8, 9),
    (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16), (15, 18), (16, 19), (17, 18),
    (18, 21), (19, 20), (19, 22), (21, 23), (22, 25), (23, 24), (24, 25), (25, 26),
)


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class CouplingGraph:
    num_qubits: int
    edges: tuple[tuple[int, int], ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise TopologyError(f"self-loop on {a}")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise TopologyError(f"edge ({a},{b}) out of range")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    def __hash__(self) -> int:
        return hash((self.num_qubits, self.edges))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CouplingGraph) and (self.num_qubits, self.edges) == (other.num_qubits, other.edges)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.num_qubits)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(n)) for n in adj)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edge_set

    def degree(self, p: int) -> int:
        return len(self.neighbors[p])

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_qubits))
        g.add_edges_from(self.edges)
        return g

    def is_connected(self) -> bool:
        return self.num_qubits == 0 or bool(np.isfinite(self.distance_matrix[0]).all())

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """All-pairs hop counts; ``inf`` marks unreachable pairs."""
        n = self.num_qubits
        dist = np.full((n, n), np.inf)
        for src in range(n):
            dist[src, src] = 0
            queue = deque([src])
            while queue:
                u = queue.popleft()
                for v in self.neighbors[u]:
                    if dist[src, v] == np.inf:
                        dist[src, v] = dist[src, u] + 1
                        queue.append(v)
        dist.setflags(write=False)
        return dist

    def to_json(self) -> dict:
        return {"num_qubits": self.num_qubits, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: dict, name: str = "custom") -> "CouplingGraph":
        return cls(int(data["num_qubits"]), tuple(tuple(e) for e in data["edges"]), name)


def line(k: int) -> CouplingGraph:
    if k < 1:
        raise TopologyError("line needs k >= 1")
    return CouplingGraph(k, tuple((i, i + 1) for i in range(k - 1)), f"line{k}")


def ring(k: int) -> CouplingGraph:
    if k < 3:
        raise TopologyError("ring needs k >= 3")
    return CouplingGraph(k, tuple((i, (i + 1) % k) for i in range(k)), f"ring{k}")


def grid(rows: int, cols: int) -> CouplingGraph:
    if rows < 1 or cols < 1:
        raise TopologyError("grid needs positive dimensions")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return CouplingGraph(rows * cols, tuple(edges), f"grid{rows}x{cols}")


def heavy_hex_27() -> CouplingGraph:
    return CouplingGraph(27, HEAVY_HEX_27_EDGES, "heavy_hex_27")


def t_shape5() -> CouplingGraph:
    """Five qubits: a line 0-1-2 with a two-qubit tail 1-3-4."""
    return CouplingGraph(5, ((0, 1), (1, 2), (1, 3), (3, 4)), "t5")


def preset(name: str) -> CouplingGraph:
    """Resolve ``line<k>``, ``ring<k>``, ``grid<r>x<c>``, ``heavy_hex_27`` or ``t5``."""
    key = name.strip().lower().replace("(", "").replace(")", "").replace(",", "x")
    if key in ("heavy_hex_27", "heavyhex27", "heavy_hex"):
        return heavy_hex_27()
    if key in ("t5", "t_shape5"):
        return t_shape5()
    m = re.fullmatch(r"(line|ring)_?(\d+)", key)
    if m:
        return (line if m.group(1) == "line" else ring)(int(m.group(2)))
    m = re.fullmatch(r"grid_?(\d+)x(\d+)", key)
    if m:
        return grid(int(m.group(1)), int(m.group(2)))
    raise TopologyError(f"unknown topology preset {name!r}")


def load_topology(spec: str) -> CouplingGraph:
    """A preset name or a path to a coupling-graph JSON file."""
    p = Path(spec)
    if p.suffix == ".json" and p.exists():
        return CouplingGraph.from_json(json.loads(p.read_text()), p.stem)
    return preset(spec)


def distance(g: CouplingGraph, a: int, b: int) -> float:
    """Hop count between two physical qubits, ``math.inf`` if unreachable."""
    if not (0 <= a < g.num_qubits and 0 <= b < g.num_qubits):
        raise TopologyError("qubit out of range")
    d = g.distance_matrix[a, b]
    return math.inf if d == np.inf else int(d)


@dataclass(frozen=True)
class Embedding:
    """Pattern node ``nodes[i]`` is placed on physical qubit ``image[i]``."""

    nodes: tuple[int, ...]
    image: tuple[int, ...]

    @property
    def mapping(self) -> dict[int, int]:
        return dict(zip(self.nodes, self.image))

    def is_valid(self, pattern: nx.Graph, host: CouplingGraph) -> bool:
        if len(set(self.image)) != len(self.image):
            return False
        m = self.mapping
        return all(host.has_edge(m[u], m[v]) for u, v in pattern.edges)


def enumerate_embeddings(pattern: nx.Graph, host: CouplingGraph, limit: int | None = None) -> list[Embedding]:
    """All injective, edge-preserving (non-induced) maps of ``pattern`` into ``host``.

    Results come out in lexicographic order of the image tuple, pattern nodes
    taken in sorted order.
    """
    nodes = tuple(sorted(pattern.nodes))
    k = len(nodes)
    if k > host.num_qubits:
        return []
    index = {v: i for i, v in enumerate(nodes)}
    earlier_nbrs = [[index[u] for u in pattern.neighbors(v) if index[u] < i] for i, v in enumerate(nodes)]
    need_degree = [pattern.degree(v) for v in nodes]
    out: list[Embedding] = []
    image = [-1] * k
    used = [False] * host.num_qubits

    def extend(i: int) -> bool:
        if i == k:
            out.append(Embedding(nodes, tuple(image)))
            return limit is not None and len(out) >= limit
        for p in range(host.num_qubits):
            if used[p] or host.degree(p) < need_degree[i]:
                continue
            if any(not host.has_edge(p, image[j]) for j in earlier_nbrs[i]):
                continue
            image[i] = p
            used[p] = True
            stop = extend(i + 1)
            used[p] = False
            if stop:
                return True
        image[i] = -1
        return False

    extend(0)
    return out


def distinct_qubit_sets(embeddings: Iterable[Embedding]) -> list[frozenset[int]]:
    seen: dict[frozenset[int], None] = {}
    for e in embeddings:
        seen.setdefault(frozenset(e.image), None)
    return list(seen)
