"""Exact branching simulation with mid-circuit measurement and reset."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..circuit import Circuit
from ..mapped import MappedCircuit
from . import _kernels as k

MAX_QUBITS = 14
PRUNE = 1e-15
EQUIVALENCE_TOL = 1e-9

_GATES = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(0.25j * math.pi)]),
    "tdg": np.diag([1, np.exp(-0.25j * math.pi)]),
}


class SimulationError(RuntimeError):
    pass


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    if kind == "rz":
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    return _GATES[kind]


@dataclass(frozen=True)
class ResetNoise:
    """Reset failure with probability ``eta[p]``: ``leave_state`` skips the
    reset, ``flip_to_one`` leaves the qubit in |1>."""

    eta: dict[int, float] = field(default_factory=dict)
    mode: str = "leave_state"

    def __post_init__(self) -> None:
        if self.mode not in ("leave_state", "flip_to_one"):
            raise ValueError(f"unknown reset failure mode {self.mode!r}")
        for p, e in self.eta.items():
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"reset failure probability of qubit {p} outside [0, 1]")


@dataclass
class _Branch:
    prob: float
    state: np.ndarray
    bits: dict[int, int]


def _split(br: _Branch, q: int) -> list[tuple[int, _Branch]]:
    p1 = min(max(k.prob_one(br.state, q), 0.0), 1.0)
    out = []
    for bit, p in ((0, 1.0 - p1), (1, p1)):
        weight = br.prob * p
        if weight < PRUNE or p <= 0.0:
            continue
        state = br.state if p == 1.0 else br.state.copy()
        k.project(state, q, bit, 1.0 / math.sqrt(p))
        out.append((bit, _Branch(weight, state, br.bits)))
    return out


def _ideal_reset(br: _Branch, q: int) -> list[_Branch]:
    out = []
    for bit, child in _split(br, q):
        if bit:
            k.apply_1q(child.state, q, _GATES["x"])
        out.append(child)
    return out


def _merge(branches: list[_Branch]) -> list[_Branch]:
    """Fold branches with equal classical bits whose states agree up to a global phase."""
    groups: dict[tuple, list[_Branch]] = {}
    for br in branches:
        key = tuple(sorted(br.bits.items()))
        for rep in groups.setdefault(key, []):
            if abs(abs(np.vdot(rep.state, br.state)) - 1.0) < 1e-12:
                rep.prob += br.prob
                break
        else:
            groups[key].append(br)
    return [br for group in groups.values() for br in group]


def exact_distribution(c: Circuit, noise: ResetNoise | None = None) -> dict[str, float]:
    """Outcome probabilities keyed by measured classical bits, highest index first."""
    active = c.active_qubits()
    if len(active) > MAX_QUBITS:
        raise SimulationError(f"{len(active)} active qubits exceed the simulator cap of {MAX_QUBITS}")
    local = {q: i for i, q in enumerate(active)}
    state = np.zeros(1 << len(active), dtype=np.complex128)
    state[0] = 1.0
    branches = [_Branch(1.0, state, {})]
    for op in c.ops:
        if op.kind == "barrier":
            continue
        qs = [local[q] for q in op.qubits]
        if op.kind == "measure":
            nxt = []
            for br in branches:
                for bit, child in _split(br, qs[0]):
                    child.bits = {**br.bits, op.clbit: bit}
                    nxt.append(child)
            branches = nxt
        elif op.kind == "reset":
            eta = noise.eta.get(op.qubits[0], 0.0) if noise else 0.0
            nxt = []
            for br in branches:
                if eta > 0.0:
                    failed = _Branch(br.prob * eta, br.state.copy(), br.bits)
                    if noise.mode == "flip_to_one":
                        for child in _ideal_reset(failed, qs[0]):
                            k.apply_1q(child.state, qs[0], _GATES["x"])
                            nxt.append(child)
                    elif failed.prob >= PRUNE:
                        nxt.append(failed)
                    br = _Branch(br.prob * (1.0 - eta), br.state, br.bits)
                    if br.prob < PRUNE:
                        continue
                nxt.extend(_ideal_reset(br, qs[0]))
            branches = _merge(nxt)
        else:
            for br in branches:
                if op.kind == "cx":
                    k.apply_cx(br.state, qs[0], qs[1])
                elif op.kind == "swap":
                    k.apply_swap(br.state, qs[0], qs[1])
                else:
                    k.apply_1q(br.state, qs[0], gate_matrix(op.kind, op.angle))
    total = sum(br.prob for br in branches)
    if abs(total - 1.0) > 1e-6:
        raise SimulationError(f"branch probabilities sum to {total}")
    measured = sorted(c.measured_clbits)
    dist: dict[str, float] = {}
    for br in branches:
        key = "".join(str(br.bits[b]) for b in reversed(measured))
        dist[key] = dist.get(key, 0.0) + br.prob / total
    return dict(sorted(dist.items()))


@dataclass(frozen=True)
class CountsRecord:
    counts: dict[str, int]
    shots: int

    def to_json(self) -> dict[str, int]:
        return dict(sorted(self.counts.items()))


def sample_counts(c: Circuit, shots: int, seed: int = 0, noise: ResetNoise | None = None,
                  dist: dict[str, float] | None = None) -> CountsRecord:
    if shots < 0:
        raise ValueError("shots must be non-negative")
    if shots == 0:
        return CountsRecord({}, 0)
    dist = exact_distribution(c, noise) if dist is None else dist
    keys = sorted(dist)
    probs = np.array([dist[x] for x in keys])
    draws = np.random.default_rng(seed).multinomial(shots, probs / probs.sum())
    return CountsRecord({x: int(n) for x, n in zip(keys, draws) if n}, shots)


def hellinger_fidelity(p: dict[str, float], q: dict[str, float]) -> float:
    overlap = sum(math.sqrt(p[x] * q[x]) for x in p.keys() & q.keys())
    return min(overlap * overlap, 1.0)


def equivalent(original: Circuit, mapped: MappedCircuit | Circuit) -> tuple[bool, float]:
    """Compare exact output distributions; classical bits keep their indices."""
    lowered = mapped.to_circuit() if isinstance(mapped, MappedCircuit) else mapped
    if sorted(original.measured_clbits) != sorted(lowered.measured_clbits):
        raise SimulationError("original and mapped circuits measure different classical bits")
    fid = hellinger_fidelity(exact_distribution(original), exact_distribution(lowered))
    return fid >= 1.0 - EQUIVALENCE_TOL, fid
