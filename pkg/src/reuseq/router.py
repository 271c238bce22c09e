"""Greedy swap-insertion router used as the depth-bound seed and baseline."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .circuit import Circuit, effective_predecessors, interaction_graph
from .mapped import MappedCircuit, StepOp, schedule_asap
from .topology import CouplingGraph


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class RoutedCircuit:
    circuit: Circuit                 # over physical qubits, swaps inserted
    initial_map: dict[int, int]      # logical -> physical
    swap_count: int
    mapped: MappedCircuit

    @property
    def depth(self) -> int:
        return self.mapped.depth


def _initial_placement(c: Circuit, g: CouplingGraph, root: int) -> dict[int, int]:
    """Grow a connected region from ``root``, placing logical qubits in
    interaction-BFS order next to their already-placed partners."""
    inter = interaction_graph(c)
    order: list[int] = []
    for start in sorted(inter.nodes, key=lambda q: (-inter.degree(q), q)):
        if start in order:
            continue
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in sorted(inter.neighbors(u)):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    dist = g.distance_matrix
    l2p: dict[int, int] = {}
    used: set[int] = set()
    for q in order:
        if not l2p:
            p = root
        else:
            frontier = sorted({v for u in used for v in g.neighbors[u] if v not in used})
            partners = [l2p[r] for r in inter.neighbors(q) if r in l2p]
            p = min(frontier, key=lambda v: (sum(dist[v, w] for w in partners), v))
        l2p[q] = p
        used.add(p)
    return l2p


def _induced_distances(g: CouplingGraph, nodes: list[int]) -> dict[int, dict[int, int]]:
    allowed = set(nodes)
    dist: dict[int, dict[int, int]] = {}
    for s in nodes:
        d = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.neighbors[u]:
                if v in allowed and v not in d:
                    d[v] = d[u] + 1
                    queue.append(v)
        dist[s] = d
    return dist


def route_greedy(c: Circuit, g: CouplingGraph, seed: int = 0) -> RoutedCircuit:
    """Route ``c`` onto ``g`` starting from a connected region grown at
    physical qubit ``seed % |P|``.

    Swaps only exchange two occupied physical qubits, so the region stays
    fixed. When the dependency front is blocked, the swap (on a region edge
    next to a blocked gate) minimising the summed distance of the blocked
    gates is inserted, ties going to the lowest edge; if no swap improves the
    sum, the first blocked gate is walked one step along a shortest path.
    """
    nq, np_ = c.num_qubits, g.num_qubits
    if nq > np_:
        raise RoutingError(f"circuit needs {nq} qubits, host has {np_}")
    if not g.is_connected():
        raise RoutingError("coupling graph is not connected")
    l2p = _initial_placement(c, g, seed % np_) if nq else {}
    region = sorted(l2p.values())
    dist = _induced_distances(g, region)
    region_set = set(region)
    region_edges = [e for e in g.edges if e[0] in region_set and e[1] in region_set]
    p2l = {p: q for q, p in l2p.items()}
    initial = dict(l2p)

    ops = c.ops
    preds = effective_predecessors(c)
    todo = [i for i, op in enumerate(ops) if op.kind != "barrier"]
    indeg = {i: len(preds[i]) for i in todo}
    succs: dict[int, list[int]] = {i: [] for i in todo}
    for j in todo:
        for i in preds[j]:
            succs[i].append(j)
    front = sorted(i for i in todo if indeg[i] == 0)
    out: list[StepOp] = []
    swaps = 0

    def executable(i: int) -> bool:
        op = ops[i]
        return not op.is_two_qubit or g.has_edge(l2p[op.qubits[0]], l2p[op.qubits[1]])

    def gate_distance(i: int) -> int:
        a, b = ops[i].qubits
        return dist[l2p[a]][l2p[b]]

    def apply_swap(a: int, b: int) -> None:
        qa, qb = p2l[a], p2l[b]
        p2l[a], p2l[b] = qb, qa
        l2p[qa], l2p[qb] = b, a

    while front:
        progressed = True
        while progressed:
            progressed = False
            for i in list(front):
                if executable(i):
                    op = ops[i]
                    phys = tuple(l2p[q] for q in op.qubits)
                    out.append(StepOp(op.kind, phys, i, op.qubits, op.clbit, op.angle))
                    if op.kind == "swap":
                        apply_swap(*phys)
                    front.remove(i)
                    for j in succs[i]:
                        indeg[j] -= 1
                        if indeg[j] == 0:
                            front.append(j)
                    progressed = True
            front.sort()
        if not front:
            break
        blocked = front
        current = sum(gate_distance(i) for i in blocked)
        touched = {l2p[q] for i in blocked for q in ops[i].qubits}
        best = None
        for a, b in region_edges:
            if a not in touched and b not in touched:
                continue
            apply_swap(a, b)
            score = sum(gate_distance(i) for i in blocked)
            apply_swap(a, b)
            if best is None or score < best[0]:
                best = (score, a, b)
        if best is not None and best[0] < current:
            a, b = best[1], best[2]
        else:
            qa, qb = ops[blocked[0]].qubits
            a = l2p[qa]
            target = l2p[qb]
            b = min(v for v in g.neighbors[a] if v in region_set and dist[v][target] == dist[a][target] - 1)
            a, b = min(a, b), max(a, b)
        apply_swap(a, b)
        out.append(StepOp("swap", (a, b)))
        swaps += 1

    mapped = schedule_asap(np_, c.num_clbits, out, initial, name=f"{c.name}_routed")
    return RoutedCircuit(mapped.to_circuit(), initial, swaps, mapped)


def best_route(c: Circuit, g: CouplingGraph) -> RoutedCircuit:
    """Shallowest greedy routing over all region roots (ties: fewer swaps, lower root)."""
    best = None
    for root in range(g.num_qubits):
        r = route_greedy(c, g, root)
        key = (r.depth, r.swap_count)
        if best is None or key < best[0]:
            best = (key, r)
    return best[1]


def depth_bound(c: Circuit, g: CouplingGraph, allow_reuse: bool) -> int:
    """Step horizon for the exact model: routed depth, plus one step per
    measurement when reuse is allowed, never above the serialisation cap."""
    routed = best_route(c, g)
    n_ops = sum(1 for op in c.ops if op.kind != "barrier")
    n_meas = c.count("measure")
    base = max(routed.depth, 1)
    if not allow_reuse:
        return base
    cap = max(n_ops + n_meas + c.num_qubits, base)
    return min(base + n_meas, cap)


def serialization_cap(c: Circuit, g: CouplingGraph) -> int:
    n_ops = sum(1 for op in c.ops if op.kind != "barrier")
    return max(n_ops + c.count("measure") + c.num_qubits, best_route(c, g).depth)
