"""Time-stepped physical schedules and their validity checker."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

from .circuit import Circuit, Op, effective_predecessors, to_qasm
from .topology import CouplingGraph


@dataclass(frozen=True)
class StepOp:
    """One operation in a step.

    ``gate`` indexes the original circuit op; inserted swaps and resets carry
    ``None``. ``logical`` lists the logical operands (empty for inserted
    swaps, the retired qubit for resets).
    """

    op: str
    phys: tuple[int, ...]
    gate: int | None = None
    logical: tuple[int, ...] = ()
    clbit: int | None = None
    angle: float | None = None

    def to_json(self) -> dict:
        d = {"op": self.op, "phys": list(self.phys), "targets": list(self.logical)}
        if self.gate is not None:
            d["gate"] = self.gate
        if self.clbit is not None:
            d["clbit"] = self.clbit
        if self.angle is not None:
            d["angle"] = self.angle
        return d

    @classmethod
    def from_json(cls, d: dict) -> "StepOp":
        return cls(d["op"], tuple(d["phys"]), d.get("gate"), tuple(d.get("targets", ())), d.get("clbit"), d.get("angle"))


@dataclass(frozen=True)
class ReuseEvent:
    measurement: int    # index of the measurement op in the original circuit
    phys: int
    acquired_by: int    # logical qubit placed on ``phys`` one step later
    step: int           # 1-based step of the measurement and reset


@dataclass(frozen=True)
class MappedCircuit:
    num_physical: int
    num_clbits: int
    steps: tuple[tuple[StepOp, ...], ...]
    initial_assignment: dict[int, int]
    reuse_events: tuple[ReuseEvent, ...] = ()
    name: str = "mapped"

    @property
    def depth(self) -> int:
        for t in range(len(self.steps), 0, -1):
            if self.steps[t - 1]:
                return t
        return 0

    @property
    def swap_count(self) -> int:
        return sum(1 for step in self.steps for o in step if o.op == "swap" and o.gate is None)

    @property
    def reset_count(self) -> int:
        return sum(1 for step in self.steps for o in step if o.op == "reset")

    @property
    def used_qubits(self) -> list[int]:
        used = set(self.initial_assignment.values())
        for step in self.steps:
            for o in step:
                used.update(o.phys)
        return sorted(used)

    def metrics(self) -> dict:
        return {"depth": self.depth, "swap_count": self.swap_count, "used_qubits": len(self.used_qubits),
                "resets": self.reset_count}

    def physical_ops(self) -> list[Op]:
        ops: list[Op] = []
        for step in self.steps:
            # a reset in a step always follows the measurement it is paired with
            ordered = sorted(step, key=lambda o: o.op == "reset")
            for o in ordered:
                ops.append(Op(o.op, o.phys, o.clbit, o.angle))
        return ops

    def to_circuit(self) -> Circuit:
        return Circuit(self.num_physical, self.num_clbits, self.physical_ops(), name=self.name)

    def to_qasm(self) -> str:
        return to_qasm(self.to_circuit())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "num_physical": self.num_physical,
            "num_clbits": self.num_clbits,
            "depth": self.depth,
            "swap_count": self.swap_count,
            "used_qubits": self.used_qubits,
            "initial_assignment": {str(q): p for q, p in sorted(self.initial_assignment.items())},
            "steps": [[o.to_json() for o in step] for step in self.steps],
            "reuse_events": [asdict(e) for e in self.reuse_events],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> "MappedCircuit":
        return cls(
            d["num_physical"], d["num_clbits"],
            tuple(tuple(StepOp.from_json(o) for o in step) for step in d["steps"]),
            {int(q): int(p) for q, p in d["initial_assignment"].items()},
            tuple(ReuseEvent(**e) for e in d.get("reuse_events", [])),
            d.get("name", "mapped"),
        )


def schedule_asap(num_physical: int, num_clbits: int, ops: Iterable[StepOp],
                  initial_assignment: dict[int, int], name: str = "mapped") -> MappedCircuit:
    """Pack a sequential list of physical ops into ASAP steps (one step per op)."""
    ready = [0] * num_physical
    steps: list[list[StepOp]] = []
    for o in ops:
        t = max(ready[p] for p in o.phys)
        while len(steps) <= t:
            steps.append([])
        steps[t].append(o)
        for p in o.phys:
            ready[p] = t + 1
    return MappedCircuit(num_physical, num_clbits, tuple(tuple(s) for s in steps), dict(initial_assignment), (), name)


@dataclass
class ValidityReport:
    violations: list[str] = field(default_factory=list)
    fidelity: float | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str) -> None:
        self.violations.append(msg)


def check_valid(mc: MappedCircuit, g: CouplingGraph, original: Circuit, semantic: bool = False) -> ValidityReport:
    """Occupancy, connectivity, reset ordering and precedence of ``mc`` against ``original``."""
    rep = ValidityReport()
    ops = original.ops
    preds = effective_predecessors(original)
    placed_at: dict[int, int] = {}
    where = dict(mc.initial_assignment)         # logical -> physical
    occupant = {}                              # physical -> logical
    for q, p in where.items():
        if not 0 <= p < g.num_qubits:
            rep.add(f"initial assignment of q{q} to p{p} outside the host")
        if p in occupant:
            rep.add(f"initial assignment maps q{occupant[p]} and q{q} to p{p}")
        occupant[p] = q
    started: set[int] = set(where)
    retired: set[int] = set()
    measured_phys: set[int] = set()
    remaining = [0] * original.num_qubits
    for op in ops:
        if op.kind != "barrier":
            for q in op.qubits:
                remaining[q] += 1
    acquisitions: dict[int, list[ReuseEvent]] = {}
    for e in mc.reuse_events:
        acquisitions.setdefault(e.step, []).append(e)

    for t, step in enumerate(mc.steps, start=1):
        busy: dict[int, str] = {}
        for o in step:
            for p in o.phys:
                if not 0 <= p < g.num_qubits:
                    rep.add(f"step {t}: {o.op} on p{p} outside the host")
                    continue
                prev = busy.get(p)
                if prev is not None and not (prev == "measure" and o.op == "reset"):
                    rep.add(f"step {t}: p{p} used by both {prev} and {o.op}")
                busy[p] = o.op
            if len(o.phys) == 2 and not g.has_edge(*o.phys):
                rep.add(f"step {t}: {o.op} on non-edge {o.phys}")
        swaps: list[tuple[int, int]] = []
        resets: list[int] = []
        for o in sorted(step, key=lambda o: o.op == "reset"):
            if o.op == "measure" and o.phys:
                measured_phys.add(o.phys[0])
            if o.gate is not None:
                if not 0 <= o.gate < len(ops):
                    rep.add(f"step {t}: unknown gate index {o.gate}")
                    continue
                src = ops[o.gate]
                if o.gate in placed_at:
                    rep.add(f"step {t}: gate {o.gate} scheduled twice")
                placed_at[o.gate] = t
                if src.kind != o.op or src.clbit != o.clbit:
                    rep.add(f"step {t}: gate {o.gate} is {src.kind}, found {o.op}")
                for q, p in zip(src.qubits, o.phys):
                    if where.get(q) != p:
                        rep.add(f"step {t}: gate {o.gate} expects q{q} on p{p}, it is on {where.get(q)}")
                    remaining[q] -= 1
                for pred in preds[o.gate]:
                    if placed_at.get(pred, t) >= t:
                        rep.add(f"step {t}: gate {o.gate} runs before its predecessor {pred}")
                if src.kind == "swap":
                    swaps.append(o.phys)
            elif o.op == "swap":
                a, b = o.phys
                if a not in occupant or b not in occupant:
                    rep.add(f"step {t}: inserted swap {o.phys} touches an unassigned physical qubit")
                swaps.append(o.phys)
            elif o.op == "reset":
                p = o.phys[0]
                if p not in measured_phys:
                    rep.add(f"step {t}: reset on p{p} before any measurement there")
                resets.append(p)
            else:
                rep.add(f"step {t}: op {o.op} without a source gate")
        for a, b in swaps:
            qa, qb = occupant.pop(a, None), occupant.pop(b, None)
            if qa is not None:
                occupant[b] = qa
                where[qa] = b
            if qb is not None:
                occupant[a] = qb
                where[qb] = a
        for p in resets:
            q = occupant.pop(p, None)
            if q is None:
                rep.add(f"step {t}: reset on unassigned p{p}")
                continue
            if remaining[q] != 0:
                rep.add(f"step {t}: q{q} reset on p{p} with {remaining[q]} ops left")
            retired.add(q)
            del where[q]
        for e in acquisitions.get(t, []):
            if e.phys in occupant:
                rep.add(f"step {t}: p{e.phys} reacquired while occupied")
            if e.acquired_by in started:
                rep.add(f"step {t}: q{e.acquired_by} acquired twice")
            if e.phys not in resets:
                rep.add(f"step {t}: q{e.acquired_by} acquires p{e.phys} without a reset there")
            started.add(e.acquired_by)
            occupant[e.phys] = e.acquired_by
            where[e.acquired_by] = e.phys

    if len(mc.reuse_events) != mc.reset_count:
        rep.add(f"{mc.reset_count} resets but {len(mc.reuse_events)} reuse events")
    for i, op in enumerate(ops):
        if op.kind != "barrier" and i not in placed_at:
            rep.add(f"gate {i} ({op.kind}) never scheduled")
    if semantic and rep.ok:
        from .simulator import equivalent

        same, fid = equivalent(original, mc)
        rep.fidelity = fid
        if not same:
            rep.add(f"output distribution differs (Hellinger fidelity {fid:.12f})")
    return rep
