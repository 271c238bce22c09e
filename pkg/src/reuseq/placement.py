"""Calibration-aware placement of a mapped circuit with per-qubit reset repetitions."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import networkx as nx

from .circuit import Circuit, Op, to_qasm
from .mapped import MappedCircuit, ReuseEvent, StepOp
from .topology import CouplingGraph, Embedding, distinct_qubit_sets, enumerate_embeddings


TIE_TOL = 1e-12


class CalibrationError(KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "calibration lookup failed"


class PlacementError(ValueError):
    pass


def _loc(qubits) -> tuple[int, ...]:
    return tuple(sorted(int(q) for q in qubits)) if len(qubits) == 2 else (int(qubits[0]),)


@dataclass
class CalibrationSet:
    gate_fidelity: dict[tuple[str, tuple[int, ...]], float] = field(default_factory=dict)
    measure_fidelity: dict[int, float] = field(default_factory=dict)
    reset_error: dict[int, list[float]] = field(default_factory=dict)      # p -> R(r, p) for r = 1..r_max
    reset_duration: dict[int, list[float]] = field(default_factory=dict)   # p -> eps(r, p) in seconds
    decoherence_time: float = 100e-6

    def __post_init__(self) -> None:
        self.gate_fidelity = {(k, _loc(loc)): float(f) for (k, loc), f in self.gate_fidelity.items()}
        for (kind, loc), f in self.gate_fidelity.items():
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"fidelity of {kind} on {loc} outside [0, 1]")
        for p, f in self.measure_fidelity.items():
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"measurement fidelity of qubit {p} outside [0, 1]")
        for p, row in self.reset_error.items():
            if any(not 0.0 <= e <= 1.0 for e in row):
                raise ValueError(f"reset error of qubit {p} outside [0, 1]")
            if len(self.reset_duration.get(p, [])) != len(row):
                raise ValueError(f"reset tables of qubit {p} disagree in length")
        for p, row in self.reset_duration.items():
            if any(x < 0 for x in row):
                raise ValueError(f"negative reset duration on qubit {p}")
        if self.decoherence_time <= 0:
            raise ValueError("decoherence time must be positive")

    def r_max(self, p: int) -> int:
        if p not in self.reset_error:
            raise CalibrationError(f"no reset table for qubit {p}")
        return len(self.reset_error[p])

    def gate(self, kind: str, phys: tuple[int, ...]) -> float:
        loc = _loc(phys)
        if kind == "measure":
            if loc[0] not in self.measure_fidelity:
                raise CalibrationError(f"no measurement fidelity for qubit {loc[0]}")
            return self.measure_fidelity[loc[0]]
        f = self.gate_fidelity.get((kind, loc))
        if f is not None:
            return f
        if kind == "swap":
            return self.gate("cx", loc) ** 3
        where = "qubit" if len(loc) == 1 else "edge"
        raise CalibrationError(f"no {kind} fidelity for {where} {loc if len(loc) == 2 else loc[0]}")

    def to_json(self) -> dict:
        def key(kind, loc):
            return f"{kind}:({loc[0]},{loc[1]})" if len(loc) == 2 else f"{kind}:{loc[0]}"

        return {
            "gate_fidelity": {key(k, loc): f for (k, loc), f in sorted(self.gate_fidelity.items())},
            "measure_fidelity": {str(p): f for p, f in sorted(self.measure_fidelity.items())},
            "reset_error": {str(p): list(v) for p, v in sorted(self.reset_error.items())},
            "reset_duration": {str(p): list(v) for p, v in sorted(self.reset_duration.items())},
            "decoherence_time": self.decoherence_time,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CalibrationSet":
        gates = {}
        for k, f in data.get("gate_fidelity", {}).items():
            m = re.fullmatch(r"\s*(\w+)\s*:\s*\(?\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)?\s*", k)
            if not m:
                raise ValueError(f"bad gate fidelity key {k!r}")
            loc = (int(m.group(2)),) if m.group(3) is None else (int(m.group(2)), int(m.group(3)))
            gates[m.group(1).lower(), loc] = f
        return cls(
            gates,
            {int(p): f for p, f in data.get("measure_fidelity", {}).items()},
            {int(p): list(v) for p, v in data.get("reset_error", {}).items()},
            {int(p): list(v) for p, v in data.get("reset_duration", {}).items()},
            float(data.get("decoherence_time", 100e-6)),
        )

    @classmethod
    def load(cls, path: str) -> "CalibrationSet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def uniform_calibration(g: CouplingGraph, fidelity: float = 0.99, reset_error: tuple[float, ...] = (0.02,),
                        reset_duration: tuple[float, ...] = (1e-6,), decoherence_time: float = 100e-6,
                        one_qubit_kinds: tuple[str, ...] = ("h", "x", "z", "s", "sdg", "t", "tdg", "rz")
                        ) -> CalibrationSet:
    gates: dict[tuple[str, tuple[int, ...]], float] = {}
    for p in range(g.num_qubits):
        for kind in one_qubit_kinds:
            gates[kind, (p,)] = fidelity
    for e in g.edges:
        gates["cx", e] = fidelity
    return CalibrationSet(gates, {p: fidelity for p in range(g.num_qubits)},
                          {p: list(reset_error) for p in range(g.num_qubits)},
                          {p: list(reset_duration) for p in range(g.num_qubits)}, decoherence_time)


def reset_fidelity(cal: CalibrationSet, r: int, p: int) -> float:
    """Fidelity of ``r`` back-to-back resets on ``p``: decoherence over their duration times success."""
    rmax = cal.r_max(p)
    if not 1 <= r <= rmax:
        raise CalibrationError(f"no reset data for {r} repetitions on qubit {p}")
    return math.exp(-cal.reset_duration[p][r - 1] / cal.decoherence_time) * (1.0 - cal.reset_error[p][r - 1])


def optimal_repetitions(cal: CalibrationSet, p: int) -> int:
    best_r, best = 1, -1.0
    for r in range(1, cal.r_max(p) + 1):
        f = reset_fidelity(cal, r, p)
        if f > best:
            best_r, best = r, f
    return best_r


def _fidelities(ops, cal: CalibrationSet, reps: dict[int, int]):
    for op in ops:
        if op.kind == "barrier":
            continue
        if op.kind == "reset":
            p = op.qubits[0]
            yield reset_fidelity(cal, reps.get(p, 1), p)
        else:
            yield cal.gate(op.kind, op.qubits)


def esp(c: Circuit, cal: CalibrationSet, reps: dict[int, int] | None = None) -> float:
    """Product of gate, measurement and reset fidelities. Each reset op stands
    for one group of ``reps[p]`` repetitions."""
    out = 1.0
    for f in _fidelities(c.ops, cal, reps or {}):
        out *= f
    return out


def placement_cost(mc: MappedCircuit, emb: Embedding, cal: CalibrationSet, reps: dict[int, int]) -> float:
    """``1 - ESP`` of ``mc`` relabelled through ``emb``; ``reps`` is keyed by host qubit."""
    return 1.0 - esp(relabel(mc, emb.mapping).to_circuit(), cal, reps)


def circuit_graph(mc: MappedCircuit) -> nx.Graph:
    """Used physical qubits of ``mc`` joined by every two-qubit op, swaps included."""
    pattern = nx.Graph()
    pattern.add_nodes_from(mc.used_qubits)
    for step in mc.steps:
        for o in step:
            if len(o.phys) == 2:
                pattern.add_edge(*o.phys)
    return pattern


def relabel(mc: MappedCircuit, mapping: dict[int, int], num_physical: int | None = None) -> MappedCircuit:
    n = num_physical if num_physical is not None else max(mc.num_physical, max(mapping.values(), default=-1) + 1)
    steps = tuple(tuple(StepOp(o.op, tuple(mapping[p] for p in o.phys), o.gate, o.logical, o.clbit, o.angle)
                        for o in step) for step in mc.steps)
    initial = {q: mapping[p] for q, p in mc.initial_assignment.items()}
    events = tuple(ReuseEvent(e.measurement, mapping[e.phys], e.acquired_by, e.step) for e in mc.reuse_events)
    return MappedCircuit(n, mc.num_clbits, steps, initial, events, mc.name)


def expand_resets(c: Circuit, reps: dict[int, int]) -> Circuit:
    ops: list[Op] = []
    for op in c.ops:
        count = reps.get(op.qubits[0], 1) if op.kind == "reset" else 1
        ops.extend([op] * count)
    return Circuit(c.num_qubits, c.num_clbits, ops, name=c.name)


@dataclass
class PlacementResult:
    embedding: Embedding
    cost: float
    reset_repetitions: dict[int, int]
    esp: float
    placed: MappedCircuit                 # mc relabelled onto the host, one reset per reuse
    output: Circuit                       # host circuit with every reset repeated R_p times
    candidates: int
    qubit_sets: int

    def to_json(self) -> dict:
        return {
            "embedding": {str(k): v for k, v in sorted(self.embedding.mapping.items())},
            "qubits": list(self.embedding.image),
            "cost": self.cost,
            "esp": self.esp,
            "reset_repetitions": {str(p): r for p, r in sorted(self.reset_repetitions.items())},
            "candidates": self.candidates,
            "qubit_sets": self.qubit_sets,
            "qasm": to_qasm(self.output),
        }


def place(mc: MappedCircuit, g: CouplingGraph, cal: CalibrationSet) -> PlacementResult:
    """Cheapest embedding of ``mc``'s qubit graph into ``g``; ties keep the first in enumeration order."""
    pattern = circuit_graph(mc)
    embeddings = enumerate_embeddings(pattern, g)
    if not embeddings:
        raise PlacementError(f"the {pattern.number_of_nodes()}-qubit circuit graph does not embed into {g.name}")
    reset_phys = sorted({o.phys[0] for step in mc.steps for o in step if o.op == "reset"})
    rep_cache: dict[int, int] = {}

    def reps_for(mapping: dict[int, int]) -> dict[int, int]:
        out = {}
        for p in reset_phys:
            h = mapping[p]
            if h not in rep_cache:
                rep_cache[h] = optimal_repetitions(cal, h)
            out[h] = rep_cache[h]
        return out

    ops = mc.physical_ops()
    best = None
    for emb in embeddings:
        m = emb.mapping
        reps = reps_for(m)
        prod = 1.0
        for op in ops:
            if op.kind == "barrier":
                continue
            phys = tuple(m[p] for p in op.qubits)
            if op.kind == "reset":
                prod *= reset_fidelity(cal, reps[phys[0]], phys[0])
            else:
                prod *= cal.gate(op.kind, phys)
            # factors never exceed one, so a product below the incumbent cannot recover
            if best is not None and prod < best[0]:
                break
        else:
            # equal products can differ in the last bits with the factor order;
            # treat those as ties so the earlier embedding keeps the place
            if best is None or (prod > best[0] and not math.isclose(prod, best[0], rel_tol=TIE_TOL, abs_tol=0.0)):
                best = (prod, emb, reps)
    prod, emb, reps = best
    placed = relabel(mc, emb.mapping, g.num_qubits)
    return PlacementResult(emb, 1.0 - prod, reps, prod, placed, expand_resets(placed.to_circuit(), reps),
                           len(embeddings), len(distinct_qubit_sets(embeddings)))
