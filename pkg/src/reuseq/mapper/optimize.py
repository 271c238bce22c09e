"""Objective descent, iterative deepening on the horizon, and extraction."""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field

from ..circuit import Circuit
from ..mapped import MappedCircuit, ReuseEvent, StepOp, check_valid
from ..router import best_route, serialization_cap
from ..sat import SAT, TIMEOUT, UNSAT, SatResult, SatSolver, sequential_counter
from ..topology import CouplingGraph
from .encoder import EncodingError, ReuseModel, add_objective_literals, encode

log = logging.getLogger(__name__)

OBJECTIVES = ("depth", "swaps", "qubits", "resets")
DEFAULT_SECONDARY = {"swaps": ("resets",), "qubits": ("depth",), "depth": ("swaps",), "resets": ()}


class InfeasibleError(RuntimeError):
    pass


class ExtractionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ReuseMode:
    """``off``, ``on``, ``exact`` (exactly ``k`` resets) or ``max_qubits`` (at most ``k`` qubits)."""

    kind: str = "on"
    k: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("off", "on", "exact", "max_qubits"):
            raise ValueError(f"unknown reuse mode {self.kind!r}")
        if self.k < 0:
            raise ValueError("reuse bound must be non-negative")

    @property
    def enabled(self) -> bool:
        return self.kind != "off"

    @classmethod
    def parse(cls, text: str) -> "ReuseMode":
        text = text.strip().lower()
        if text in ("off", "on"):
            return cls(text)
        m = re.fullmatch(r"(exact|exactly|max-qubits|max_qubits|at_most_qubits):?\(?(\d+)\)?", text)
        if not m:
            raise ValueError(f"cannot parse reuse mode {text!r}")
        kind = "exact" if m.group(1).startswith("exact") else "max_qubits"
        return cls(kind, int(m.group(2)))

    def __str__(self) -> str:
        return self.kind if self.kind in ("off", "on") else f"{self.kind}:{self.k}"


@dataclass
class OptimalAssignment:
    status: str                      # "optimal", "feasible" (timed out after a model), "timeout" or "unsat"
    result: SatResult | None
    values: dict[str, int] = field(default_factory=dict)
    proven: dict[str, bool] = field(default_factory=dict)
    solve_calls: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def objective_value(model: ReuseModel, res: SatResult, objective: str) -> int:
    if objective == "depth":
        steps = [t for (gi, t), lit in model.d.items() if res[lit]]
        steps += [t for (e, t), lit in model.sigma.items() if res[lit]]
        return max(steps, default=-1) + 1
    if objective == "qubits":
        return len({p for (q, p, t), lit in model.pi.items() if res[lit]})
    lits = add_objective_literals(model, objective)
    return sum(1 for lit in lits if res[lit])


class _Bound:
    """Incremental ``count(lits) <= v`` assumptions through a sequential counter."""

    def __init__(self, model: ReuseModel, solver: SatSolver, objective: str, start: int):
        self.objective = objective
        self.model = model
        self.solver = solver
        lits = add_objective_literals(model, objective)
        self.outs = None if objective == "depth" else sequential_counter(model.cnf, lits, start + 1)
        solver.sync(model.cnf)

    def at_most(self, v: int) -> list[int]:
        if self.objective == "depth":
            if v < 1:
                return [-self.model.true_lit]
            return [self.model.finish[v]] if v < self.model.T else []
        if v < len(self.outs):
            return [-self.outs[v]]
        return []


def solve(model: ReuseModel, objectives: tuple[str, ...] = ("swaps",), mode: ReuseMode = ReuseMode("on"),
          budget: float | None = None, backend: str | None = None, seed: int = 0,
          initial_bound: dict[str, int] | None = None, warm: MappedCircuit | None = None) -> OptimalAssignment:
    """Lexicographically minimise ``objectives`` over the model.

    Each stage descends linearly: after a model with value ``v`` the bound
    ``<= v-1`` is assumed, and an UNSAT answer proves ``v`` optimal. The
    optimum of a stage is kept as an assumption for the following stages.
    """
    if model.infeasible:
        return OptimalAssignment("unsat", None)
    deadline = None if budget is None else time.monotonic() + budget
    solver = SatSolver(backend=backend, seed=seed)
    base: list[int] = []
    out = OptimalAssignment("unsat", None)

    def remaining() -> float | None:
        return None if deadline is None else max(0.0, deadline - time.monotonic())

    def run(assumptions: list[int]) -> SatResult:
        out.solve_calls += 1
        res = solver.solve(assumptions, remaining())
        if res.status == SAT:
            # keep the search close to the incumbent
            _set_phases(solver, _phases_from_result(model, res))
        return res

    try:
        solver.sync(model.cnf)
        _set_phases(solver, _phases_from_mapped(model, warm) if warm is not None else
                    [-x for x in model.swap_literals + model.reset_literals])
        # reuse-mode cardinalities
        if mode.kind == "exact":
            lits = model.reset_literals
            if mode.k > len(lits):
                return out
            outs = sequential_counter(model.cnf, lits, mode.k + 1, exact=True)
            solver.sync(model.cnf)
            # Every reset hands its physical qubit to a fresh logical qubit, so k resets
            # means |Q| - k occupied qubits. Walking the qubit count down one at a time
            # reaches such models far faster than asking for k resets directly.
            if mode.k > 0:
                target = model.circuit.num_qubits - mode.k
                qb = _Bound(model, solver, "qubits", model.circuit.num_qubits)
                res = run(base)
                while res.status == SAT:
                    used = objective_value(model, res, "qubits")
                    if used <= target:
                        break
                    res = run(base + qb.at_most(used - 1))
                if res.status != SAT:
                    out.status = "timeout" if res.status == TIMEOUT else "unsat"
                    return out
            if mode.k > 0:
                base.append(outs[mode.k - 1])
            if mode.k < len(outs):
                base.append(-outs[mode.k])
        elif mode.kind == "max_qubits":
            lits = add_objective_literals(model, "qubits")
            outs = sequential_counter(model.cnf, lits, mode.k + 1)
            if mode.k < len(outs):
                base.append(-outs[mode.k])
        solver.sync(model.cnf)

        hint = dict(initial_bound or {})
        res = None
        first = objectives[0] if objectives else None
        if first in hint and first != "depth":
            bound = _Bound(model, solver, first, hint[first])
            res = run(base + bound.at_most(hint[first]))
        if res is None or res.status == UNSAT:
            res = run(base)
        if res.status == TIMEOUT:
            out.status = "timeout"
            return out
        if res.status == UNSAT:
            return out
        out.result = res
        out.status = "optimal"
        for obj in objectives:
            value = objective_value(model, res, obj)
            bound = _Bound(model, solver, obj, value)
            proven = False
            while True:
                if value == 0:
                    proven = True
                    break
                attempt = run(base + bound.at_most(value - 1))
                if attempt.status == SAT:
                    res = attempt
                    out.result = res
                    value = objective_value(model, res, obj)
                    continue
                if attempt.status == UNSAT:
                    proven = True
                break
            out.values[obj] = value
            out.proven[obj] = proven
            if not proven:
                out.status = "feasible"
                break
            base += bound.at_most(value)
        return out
    finally:
        solver.close()


def _set_phases(solver: SatSolver, lits: list[int]) -> None:
    engine = getattr(solver, "_engine", None)
    if not lits or engine is None or not hasattr(engine, "set_phases"):
        return
    try:
        engine.set_phases(lits)
    except (NotImplementedError, AttributeError, TypeError):
        pass


def _phases_from_result(model: ReuseModel, res: SatResult) -> list[int]:
    out = []
    for table in (model.pi, model.a, model.d, model.u, model.sigma, model.l):
        for lit in table.values():
            out.append(lit if res[lit] else -lit)
    return out


def _phases_from_mapped(model: ReuseModel, mc: MappedCircuit) -> list[int]:
    """Decision phases reproducing a reuse-free schedule (typically the greedy routing)."""
    nq = model.circuit.num_qubits
    pos = dict(mc.initial_assignment)
    true: set[int] = set()
    done: dict[int, int] = {}
    for t in range(model.T):
        for q, p in pos.items():
            if (q, p, t) in model.pi:
                true.add(model.pi[q, p, t])
        step = mc.steps[t] if t < len(mc.steps) else ()
        for o in step:
            if o.gate is not None:
                done[o.gate] = t
                if (o.gate, t) in model.d:
                    true.add(model.d[o.gate, t])
            elif o.op == "swap":
                e = tuple(sorted(o.phys))
                if (e, t) in model.sigma:
                    true.add(model.sigma[e, t])
        for o in step:
            if o.op == "swap":
                a, b = o.phys
                inv = {p: q for q, p in pos.items()}
                qa, qb = inv.get(a), inv.get(b)
                if qa is not None:
                    pos[qa] = b
                if qb is not None:
                    pos[qb] = a
    for (gi, t), lit in model.u.items():
        if gi in done and done[gi] <= t:
            true.add(lit)
    lits = []
    for table in (model.pi, model.d, model.u, model.sigma, model.l):
        lits += [lit if lit in true else -lit for lit in table.values()]
    lits += list(model.a.values())
    return lits if len(mc.initial_assignment) == nq else []


def extract(model: ReuseModel, res: SatResult, name: str = "mapped") -> MappedCircuit:
    """Read the schedule, swaps, resets and reuse events off a satisfying assignment."""
    c, g, T = model.circuit, model.graph, model.T
    ops = c.ops
    nq = c.num_qubits

    def where(q: int, t: int) -> int | None:
        found = [p for p in range(g.num_qubits) if res[model.pi[q, p, t]]]
        if len(found) > 1:
            raise ExtractionError(f"q{q} on several physical qubits at step {t}: {found}")
        return found[0] if found else None

    pos = [[where(q, t) for t in range(T)] for q in range(nq)]
    steps: list[list[StepOp]] = [[] for _ in range(T)]
    for (gi, t), lit in sorted(model.d.items()):
        if not res[lit]:
            continue
        op = ops[gi]
        phys = tuple(pos[q][t] for q in op.qubits)
        if None in phys:
            raise ExtractionError(f"gate {gi} scheduled at step {t} on an unassigned qubit")
        steps[t].append(StepOp(op.kind, phys, gi, op.qubits, op.clbit, op.angle))
    for (e, t), lit in sorted(model.sigma.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if res[lit]:
            steps[t].append(StepOp("swap", e))
    resets: dict[tuple[int, int], int] = {}
    for (m, t), lit in sorted(model.r.items()):
        if res[lit]:
            q = ops[m].qubits[0]
            p = pos[q][t]
            steps[t].append(StepOp("reset", (p,), None, (q,)))
            resets[p, t] = m
    events = []
    for q in range(nq):
        for t in range(T - 1):
            if pos[q][t] is None and pos[q][t + 1] is not None:
                p = pos[q][t + 1]
                if (p, t) not in resets:
                    raise ExtractionError(f"q{q} acquires p{p} at step {t + 1} without a reset")
                events.append(ReuseEvent(resets[p, t], p, q, t + 1))
    events.sort(key=lambda e: (e.step, e.phys))
    while steps and not steps[-1]:
        steps.pop()
    initial = {q: pos[q][0] for q in range(nq) if pos[q][0] is not None}
    return MappedCircuit(g.num_qubits, c.num_clbits, tuple(tuple(s) for s in steps), initial, tuple(events), name)


@dataclass
class OptimizationResult:
    mapped: MappedCircuit | None
    optimal: bool
    values: dict[str, int]
    T: int
    objectives: tuple[str, ...]
    mode: ReuseMode
    runtime: float
    status: str
    attempts: list[dict] = field(default_factory=list)

    def summary(self) -> dict:
        m = self.mapped.metrics() if self.mapped else {}
        return {"status": self.status, "optimal": self.optimal, "objectives": list(self.objectives),
                "reuse": str(self.mode), "T": self.T, "values": self.values, **m,
                "runtime_s": round(self.runtime, 3)}


def optimize_circuit(c: Circuit, g: CouplingGraph, objective: str = "swaps", reuse: ReuseMode | str = "on",
                     secondary: tuple[str, ...] | None = None, budget: float | None = None,
                     T: int | None = None, seed: int | None = None, backend: str | None = None,
                     verify: bool = True) -> OptimizationResult:
    """Horizon from the greedy router, then encode/solve with iterative deepening.

    ``T`` overrides the initial horizon. On UNSAT the horizon grows by
    ``max(1, |M|)`` steps up to the serialisation cap.
    """
    start = time.monotonic()
    mode = ReuseMode.parse(reuse) if isinstance(reuse, str) else reuse
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if secondary is None:
        secondary = DEFAULT_SECONDARY[objective]
    objectives = (objective,) + tuple(s for s in secondary if s != objective)
    if not mode.enabled:
        objectives = tuple(o for o in objectives if o != "resets")
    if seed is None:
        seed = int(os.environ.get("REUSEQ_SOLVER_SEED", "0"))
    if not mode.enabled and c.num_qubits > g.num_qubits:
        raise InfeasibleError(f"{c.num_qubits} logical qubits exceed {g.num_qubits} physical qubits")
    if not g.is_connected():
        raise InfeasibleError("coupling graph is not connected")

    routed = best_route(c, g) if c.num_qubits <= g.num_qubits else None
    n_meas = c.count("measure")
    cap = serialization_cap(c, g) if routed else sum(1 for op in c.ops if op.kind != "barrier") + n_meas + c.num_qubits
    if T is None:
        base = max(routed.depth if routed else 1, 1)
        if objective == "qubits" or mode.kind in ("exact", "max_qubits"):
            # fewer qubits or forced resets serialise the circuit; start at the full horizon
            T = cap
        else:
            T = min(base + n_meas, cap) if mode.enabled else base
    step = max(1, n_meas)
    hint = {}
    if routed is not None and mode.kind in ("on", "off") and T >= routed.depth:
        hint["swaps"] = routed.swap_count
    attempts = []
    while True:
        remaining = None if budget is None else max(0.0, budget - (time.monotonic() - start))
        try:
            model = encode(c, g, T, mode.enabled)
        except EncodingError as exc:
            raise InfeasibleError(str(exc)) from exc
        sol = solve(model, objectives, mode, remaining, backend, seed, hint,
                    warm=routed.mapped if routed is not None and routed.depth <= T else None)
        attempts.append({"T": T, "status": sol.status, "values": dict(sol.values), "calls": sol.solve_calls})
        log.info("T=%d status=%s values=%s", T, sol.status, sol.values)
        if sol.result is not None:
            mapped = extract(model, sol.result, name=f"{c.name}_mapped")
            if verify:
                rep = check_valid(mapped, g, c)
                if not rep.ok:
                    raise ExtractionError("; ".join(rep.violations[:5]))
            status = "optimal" if sol.optimal else "timeout"
            return OptimizationResult(mapped, sol.optimal, sol.values, T, objectives, mode,
                                      time.monotonic() - start, status, attempts)
        out_of_time = budget is not None and time.monotonic() - start >= budget
        if out_of_time or T >= cap:
            status = "timeout" if out_of_time else "infeasible"
            return OptimizationResult(None, False, {}, T, objectives, mode, time.monotonic() - start, status,
                                      attempts)
        T = min(T + step, cap)
