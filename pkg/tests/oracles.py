"""Exhaustive reference searches over mapping states for small instances.

A state is the logical qubit held by each physical qubit (or -1), the set of
executed ops and the set of logical qubits that have been placed. Ready ops
are executed eagerly, which never hurts: executing an op only enables others.
"""

from __future__ import annotations

import heapq
import itertools
import random

from reuseq.circuit import Circuit, Op, build_dag, generate_bv, generate_h_ladder
from reuseq.topology import CouplingGraph, line, preset, t_shape5


class _Instance:
    def __init__(self, c: Circuit, g: CouplingGraph):
        self.c = c
        self.g = g
        self.ops = [op for op in c.ops if op.kind != "barrier"]
        keep = Circuit(c.num_qubits, c.num_clbits, self.ops)
        self.preds = [frozenset(p) for p in build_dag(keep).predecessors()]
        self.full = (1 << len(self.ops)) - 1
        self.edges = g.edge_set
        self.adj = lambda a, b: (min(a, b), max(a, b)) in self.edges
        self.meas_of = {op.qubits[0]: i for i, op in enumerate(self.ops) if op.kind == "measure"}
        self.ops_on = {q: [i for i, op in enumerate(self.ops) if q in op.qubits] for q in range(c.num_qubits)}

    def close(self, pos: tuple[int, ...], done: int) -> int:
        where = {q: p for p, q in enumerate(pos) if q >= 0}
        changed = True
        while changed:
            changed = False
            for i, op in enumerate(self.ops):
                if done >> i & 1 or any(not done >> j & 1 for j in self.preds[i]):
                    continue
                if any(q not in where for q in op.qubits):
                    continue
                if len(op.qubits) == 2 and not self.adj(where[op.qubits[0]], where[op.qubits[1]]):
                    continue
                done |= 1 << i
                changed = True
        return done

    def swaps(self, pos: tuple[int, ...]):
        for a, b in sorted(self.edges):
            if pos[a] >= 0 and pos[b] >= 0:
                nxt = list(pos)
                nxt[a], nxt[b] = nxt[b], nxt[a]
                yield tuple(nxt)


def min_swaps(c: Circuit, g: CouplingGraph) -> int | None:
    """Fewest swaps over every initial placement, no reuse. Swaps only touch occupied qubits."""
    inst = _Instance(c, g)
    nq, npq = c.num_qubits, g.num_qubits
    if nq > npq:
        return None
    dist: dict[tuple, int] = {}
    heap = []
    for phys in itertools.permutations(range(npq), nq):
        pos = [-1] * npq
        for q, p in enumerate(phys):
            pos[p] = q
        key = (tuple(pos), inst.close(tuple(pos), 0))
        if key not in dist:
            dist[key] = 0
            heapq.heappush(heap, (0, key))
    while heap:
        d, key = heapq.heappop(heap)
        if d > dist[key]:
            continue
        pos, done = key
        if done == inst.full:
            return d
        for nxt in inst.swaps(pos):
            k2 = (nxt, inst.close(nxt, done))
            if d + 1 < dist.get(k2, 1 << 30):
                dist[k2] = d + 1
                heapq.heappush(heap, (d + 1, k2))
    return None


def _handoffs(inst: _Instance, pos: tuple[int, ...], done: int, started: int):
    """Measured qubits whose ops are all done hand their slot to an unplaced qubit."""
    waiting = [q for q in range(inst.c.num_qubits) if not started >> q & 1]
    for p, q in enumerate(pos):
        if q < 0 or q not in inst.meas_of:
            continue
        if not all(done >> i & 1 for i in inst.ops_on[q]):
            continue
        for q2 in waiting:
            nxt = list(pos)
            nxt[p] = q2
            yield tuple(nxt), started | (1 << q2)


def min_qubits(c: Circuit, g: CouplingGraph) -> int | None:
    """Fewest physical qubits when measured qubits may be reset and handed to unplaced ones."""
    inst = _Instance(c, g)
    nq, npq = c.num_qubits, g.num_qubits
    for s in range(1, min(nq, npq) + 1):
        seen = set()
        stack = []
        for phys in itertools.permutations(range(npq), s):
            for logical in itertools.permutations(range(nq), s):
                pos = [-1] * npq
                for q, p in zip(logical, phys):
                    pos[p] = q
                started = sum(1 << q for q in logical)
                key = (tuple(pos), inst.close(tuple(pos), 0), started)
                if key not in seen:
                    seen.add(key)
                    stack.append(key)
        while stack:
            pos, done, started = stack.pop()
            if done == inst.full:
                return s
            moves = [(nxt, started) for nxt in inst.swaps(pos)]
            moves += list(_handoffs(inst, pos, done, started))
            for nxt, st in moves:
                key = (nxt, inst.close(nxt, done), st)
                if key not in seen:
                    seen.add(key)
                    stack.append(key)
    return None


def random_circuit(nq: int, n_cx: int, seed: int) -> Circuit:
    """Random CX/H body; every qubit is measured right after its last gate."""
    rng = random.Random(seed)
    body: list[Op] = []
    for _ in range(n_cx):
        a, b = rng.sample(range(nq), 2)
        if rng.random() < 0.3:
            body.append(Op("h", (a,)))
        body.append(Op("cx", (a, b)))
    last = {q: -1 for q in range(nq)}
    for i, op in enumerate(body):
        for q in op.qubits:
            last[q] = i
    ops: list[Op] = []
    for q in range(nq):
        if last[q] == -1:
            ops.append(Op("measure", (q,), clbit=q))
    for i, op in enumerate(body):
        ops.append(op)
        for q in op.qubits:
            if last[q] == i:
                ops.append(Op("measure", (q,), clbit=q))
    return Circuit(nq, nq, ops, name=f"rand{nq}_{n_cx}_{seed}")


def oracle_cases() -> list[tuple[Circuit, CouplingGraph]]:
    """Random and structured circuits with at most five qubits on small lines and the T-shaped host."""
    out = []
    for host in ("line3", "line4", "line5", "t5"):
        g = preset(host)
        for nq in range(2, min(5, g.num_qubits) + 1):
            for s in range(2):
                out.append((random_circuit(nq, 4 + nq, s + 10 * nq), g))
    out += [(generate_bv(4), line(4)), (generate_bv(5), t_shape5()), (generate_bv(5), line(5)),
            (generate_h_ladder(4), t_shape5())]
    return out
