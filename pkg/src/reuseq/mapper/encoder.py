"""Propositional model of joint swap insertion and reset-based qubit reuse.

Time steps are 0-based internally (``0..T-1``). Every op, inserted swap and
reset lasts one step; a reset shares the step of its measurement and the
acquiring logical qubit appears on the freed physical qubit one step later.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..circuit import Circuit, effective_predecessors
from ..sat import Cnf, at_most_one, exactly_one
from ..topology import CouplingGraph


class EncodingError(ValueError):
    pass


@dataclass
class ReuseModel:
    circuit: Circuit
    graph: CouplingGraph
    T: int
    reuse: bool
    cnf: Cnf
    gates: list[int]                                  # original op indices that get scheduled
    window: dict[int, tuple[int, int]]                # gate -> (earliest, latest) step
    d: dict[tuple[int, int], int]                     # (gate, t) -> timing literal
    u: dict[tuple[int, int], int]                     # (gate, t) -> "done by step t"
    pi: dict[tuple[int, int, int], int]               # (q, p, t) -> assignment literal
    a: dict[tuple[int, int], int]                     # (q, t) -> assignment status
    sigma: dict[tuple[tuple[int, int], int], int]     # (edge, t) -> swap literal
    l: dict[int, int] = field(default_factory=dict)   # measurement -> reset location literal
    r: dict[tuple[int, int], int] = field(default_factory=dict)   # (measurement, t) -> reset at t
    reset_candidate: dict[int, int] = field(default_factory=dict)  # logical qubit -> its final measurement
    used: dict[int, int] = field(default_factory=dict)             # physical -> "ever occupied"
    finish: dict[int, int] = field(default_factory=dict)           # z -> "depth <= z"
    infeasible: bool = False
    true_lit: int = 0

    @property
    def swap_literals(self) -> list[int]:
        return [self.sigma[k] for k in sorted(self.sigma)]

    @property
    def reset_literals(self) -> list[int]:
        return [self.l[m] for m in sorted(self.l)]

    @property
    def qubit_literals(self) -> list[int]:
        return [self.used[p] for p in sorted(self.used)]

    def status(self, q: int, t: int) -> int:
        return self.a.get((q, t), self.true_lit)


def _windows(c: Circuit, gates: list[int], preds: list[list[int]], T: int) -> dict[int, tuple[int, int]]:
    early: dict[int, int] = {}
    for g in gates:
        early[g] = max((early[p] + 1 for p in preds[g]), default=0)
    succs: dict[int, list[int]] = {g: [] for g in gates}
    for g in gates:
        for p in preds[g]:
            succs[p].append(g)
    tail: dict[int, int] = {}
    for g in reversed(gates):
        tail[g] = max((tail[s] + 1 for s in succs[g]), default=0)
    return {g: (early[g], T - 1 - tail[g]) for g in gates}


def encode(c: Circuit, g: CouplingGraph, T: int, reuse_enabled: bool) -> ReuseModel:
    """Build the CNF for circuit ``c`` on host ``g`` with ``T`` steps."""
    if T < 1:
        raise EncodingError("T must be at least 1")
    nq, np_ = c.num_qubits, g.num_qubits
    if not reuse_enabled and nq > np_:
        raise EncodingError(f"{nq} logical qubits exceed {np_} physical qubits without reuse")
    cnf = Cnf()
    true_lit = cnf.new_var()
    cnf.add_clause([true_lit])

    preds = effective_predecessors(c)
    gates = [i for i, op in enumerate(c.ops) if op.kind != "barrier"]
    window = _windows(c, gates, preds, T)
    infeasible = any(lo > hi for lo, hi in window.values())

    model = ReuseModel(c, g, T, reuse_enabled, cnf, gates, window, {}, {}, {}, {}, {}, true_lit=true_lit,
                       infeasible=infeasible)
    if infeasible:
        return model
    ops = c.ops
    steps = range(T)
    P = range(np_)
    Q = range(nq)
    edges = list(g.edges)
    incident: dict[int, list[tuple[int, int]]] = {p: [] for p in P}
    for e in edges:
        incident[e[0]].append(e)
        incident[e[1]].append(e)

    # -- variables
    pi = model.pi
    for q in Q:
        for t in steps:
            for p in P:
                pi[q, p, t] = cnf.new_var()
    a = model.a
    if reuse_enabled:
        for q in Q:
            for t in steps:
                a[q, t] = cnf.new_var()
    status = model.status
    sigma = model.sigma
    for t in range(T - 1):
        for e in edges:
            sigma[e, t] = cnf.new_var()
    d, u = model.d, model.u
    for gi in gates:
        lo, hi = window[gi]
        for t in range(lo, hi + 1):
            d[gi, t] = cnf.new_var()
            u[gi, t] = cnf.new_var()

    ops_on: dict[int, list[int]] = {q: [] for q in Q}
    for gi in gates:
        for q in ops[gi].qubits:
            ops_on[q].append(gi)

    # -- scheduling: order encoding, u(g,t) == "g ran at or before t"
    for gi in gates:
        lo, hi = window[gi]
        cnf.add_clause([u[gi, hi]])
        for t in range(lo, hi + 1):
            prev = u.get((gi, t - 1))
            cnf.add_clause([-d[gi, t], u[gi, t]])
            if prev is None:
                cnf.add_clause([-u[gi, t], d[gi, t]])
            else:
                cnf.add_clause([-prev, u[gi, t]])
                cnf.add_clause([-d[gi, t], -prev])
                cnf.add_clause([-u[gi, t], prev, d[gi, t]])
        for pred in preds[gi]:
            plo, phi = window[pred]
            for t in range(lo, hi + 1):
                # g done by t  =>  pred done by t-1
                if t - 1 < plo:
                    cnf.add_clause([-u[gi, t]])
                elif t - 1 <= phi:
                    cnf.add_clause([-u[gi, t], u[pred, t - 1]])

    # -- assignment: exactly one location while assigned, injective among assigned
    for q in Q:
        for t in steps:
            row = [pi[q, p, t] for p in P]
            if reuse_enabled:
                for lit in row:
                    cnf.add_clause([-lit, a[q, t]])
                cnf.add_clause([-a[q, t]] + row)
                at_most_one(cnf, row)
            else:
                exactly_one(cnf, row)
    for p in P:
        for t in steps:
            at_most_one(cnf, [pi[q, p, t] for q in Q])

    # -- gates act on assigned qubits; two-qubit gates on coupled locations
    for gi in gates:
        op = ops[gi]
        for t in range(window[gi][0], window[gi][1] + 1):
            if reuse_enabled:
                for q in op.qubits:
                    cnf.add_clause([-d[gi, t], a[q, t]])
            if op.is_two_qubit:
                q0, q1 = op.qubits
                for p in P:
                    cnf.add_clause([-d[gi, t], -pi[q0, p, t]] + [pi[q1, v, t] for v in g.neighbors[p]])

    # -- swaps and frame axioms
    busy: dict[tuple[int, int], int] = {}
    for q in Q:
        for t in range(T - 1):
            lits = [d[gi, t] for gi in ops_on[q] if (gi, t) in d]
            if lits:
                busy[q, t] = cnf.new_var()
                for lit in lits:
                    cnf.add_clause([-lit, busy[q, t]])
    for t in range(T - 1):
        for p in P:
            at_most_one(cnf, [sigma[e, t] for e in incident[p]])
        for e in edges:
            s = sigma[e, t]
            i, j = e
            cnf.add_clause([-s] + [pi[q, i, t] for q in Q])
            cnf.add_clause([-s] + [pi[q, j, t] for q in Q])
            for q in Q:
                cnf.add_clause([-s, -pi[q, i, t], pi[q, j, t + 1]])
                cnf.add_clause([-s, -pi[q, j, t], pi[q, i, t + 1]])
                if (q, t) in busy:
                    cnf.add_clause([-s, -pi[q, i, t], -busy[q, t]])
                    cnf.add_clause([-s, -pi[q, j, t], -busy[q, t]])
        for q in Q:
            nxt = status(q, t + 1)
            for p in P:
                clause = [-pi[q, p, t], pi[q, p, t + 1]] + [sigma[e, t] for e in incident[p]]
                if reuse_enabled:
                    clause.append(-nxt)
                cnf.add_clause(clause)

    if reuse_enabled:
        _encode_reuse(model, ops_on)
    return model


def _encode_reuse(model: ReuseModel, ops_on: dict[int, list[int]]) -> None:
    c, g, T, cnf = model.circuit, model.graph, model.T, model.cnf
    ops = c.ops
    Q = range(c.num_qubits)
    P = range(g.num_qubits)
    pi, a, d = model.pi, model.a, model.d

    # a qubit may be reset only after its final operation, which must be a measurement
    for q in Q:
        if ops_on[q] and ops[ops_on[q][-1]].kind == "measure":
            model.reset_candidate[q] = ops_on[q][-1]
    for q, m in model.reset_candidate.items():
        model.l[m] = lm = cnf.new_var()
        lo, hi = model.window[m]
        for t in range(lo, hi + 1):
            if t == T - 1:
                cnf.add_clause([-lm, -d[m, t]])
                continue
            model.r[m, t] = rt = cnf.new_var()
            cnf.add_clause([-rt, lm])
            cnf.add_clause([-rt, d[m, t]])
            cnf.add_clause([-lm, -d[m, t], rt])

    # leaving: q is on p at t and unassigned at t+1
    leaves: dict[tuple[int, int, int], int] = {}
    for q in model.reset_candidate:
        for t in range(T - 1):
            for p in P:
                w = cnf.new_var()
                leaves[q, p, t] = w
                cnf.add_clause([-w, pi[q, p, t]])
                cnf.add_clause([-w, -a[q, t + 1]])

    for q in Q:
        m = model.reset_candidate.get(q)
        ever_prev = None
        for t in range(T):
            ever = cnf.new_var()
            cnf.add_clause([-a[q, t], ever])
            if ever_prev is not None:
                cnf.add_clause([-ever_prev, ever])
            if t < T - 1:
                # unassignment happens exactly at the reset of the final measurement
                rt = model.r.get((m, t)) if m is not None else None
                if rt is None:
                    cnf.add_clause([-a[q, t], a[q, t + 1]])
                else:
                    cnf.add_clause([-a[q, t], a[q, t + 1], rt])
                    cnf.add_clause([-rt, -a[q, t + 1]])
                # a qubit is acquired once, never after having been assigned
                cnf.add_clause([a[q, t], -a[q, t + 1], -ever])
                # acquisition only onto a physical qubit freed by a reset at t
                for p in P:
                    cnf.add_clause([a[q, t], -a[q, t + 1], -pi[q, p, t + 1]] +
                                   [leaves[v, p, t] for v in model.reset_candidate if v != q])
                # a reset always hands its physical qubit to another logical qubit
                if m is not None:
                    for p in P:
                        cnf.add_clause([-pi[q, p, t], a[q, t + 1]] +
                                       [pi[v, p, t + 1] for v in Q if v != q])
            ever_prev = ever


def add_objective_literals(model: ReuseModel, objective: str) -> list[int]:
    """Create (once) and return the literals whose count an objective minimises.

    For ``depth`` the returned list is ``finish[1..T]`` where ``finish[z]``
    forces every gate to be done by step ``z`` (1-based) and no swap after it.
    """
    cnf = model.cnf
    if objective == "swaps":
        return model.swap_literals
    if objective == "resets":
        return model.reset_literals
    if objective == "qubits":
        if not model.used:
            for p in range(model.graph.num_qubits):
                model.used[p] = cnf.new_var()
            for (q, p, t), lit in model.pi.items():
                cnf.add_clause([-lit, model.used[p]])
        return model.qubit_literals
    if objective == "depth":
        if not model.finish:
            for z in range(1, model.T + 1):
                f = model.finish[z] = cnf.new_var()
                for gi in model.gates:
                    lo, hi = model.window[gi]
                    if z - 1 < lo:
                        cnf.add_clause([-f])
                    elif z - 1 < hi:
                        cnf.add_clause([-f, model.u[gi, z - 1]])
                for (e, t), s in model.sigma.items():
                    if t >= z:
                        cnf.add_clause([-f, -s])
        return [model.finish[z] for z in range(1, model.T + 1)]
    raise EncodingError(f"unknown objective {objective!r}")
