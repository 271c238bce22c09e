"""Logical circuit IR, OpenQASM-2 subset parsing/printing and benchmark generators."""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

ONE_QUBIT_GATES = ("h", "x", "z", "s", "sdg", "t", "tdg", "rz")
TWO_QUBIT_GATES = ("cx", "swap")
NON_UNITARY = ("measure", "reset", "barrier")
GATE_SET = ONE_QUBIT_GATES + TWO_QUBIT_GATES + NON_UNITARY

_ANGLE_DIGITS = 12


class CircuitError(ValueError):
    """Raised for structurally invalid circuits."""


class QasmError(ValueError):
    """Syntax or semantic error while parsing QASM text."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


def canonical_angle(value: float) -> float:
    """Round an angle to the printer precision so printing round-trips exactly."""
    if not math.isfinite(value):
        raise CircuitError(f"non-finite angle {value!r}")
    return float(format(value, f".{_ANGLE_DIGITS}g"))


@dataclass(frozen=True)
class Op:
    kind: str
    qubits: tuple[int, ...]
    clbit: int | None = None
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_SET:
            raise CircuitError(f"unsupported gate {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        n = len(self.qubits)
        if self.kind in TWO_QUBIT_GATES:
            if n != 2 or self.qubits[0] == self.qubits[1]:
                raise CircuitError(f"{self.kind} needs two distinct qubits, got {self.qubits}")
        elif self.kind == "barrier":
            # multi-qubit barriers are kept as one fence op
            if n < 1 or len(set(self.qubits)) != n:
                raise CircuitError("barrier needs distinct qubits")
        elif n != 1:
            raise CircuitError(f"{self.kind} acts on exactly one qubit")
        if self.kind == "measure":
            if self.clbit is None:
                raise CircuitError("measure needs a classical bit")
        elif self.clbit is not None:
            raise CircuitError(f"{self.kind} does not write a classical bit")
        if self.kind == "rz":
            if self.angle is None:
                raise CircuitError("rz needs an angle")
            object.__setattr__(self, "angle", canonical_angle(float(self.angle)))
        elif self.angle is not None:
            raise CircuitError(f"{self.kind} takes no angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_GATES

    def remap(self, qmap: Sequence[int] | dict[int, int], cmap: dict[int, int] | None = None) -> "Op":
        clbit = self.clbit
        if clbit is not None and cmap is not None:
            clbit = cmap[clbit]
        return Op(self.kind, tuple(qmap[q] for q in self.qubits), clbit, self.angle)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_clbits: int
    ops: tuple[Op, ...] = ()
    name: str = field(default="circuit", compare=False)
    # accept resets of qubits that were never measured (reset-characterization circuits)
    free_resets: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise CircuitError("negative register size")
        written: set[int] = set()
        measured: set[int] = set()
        for i, op in enumerate(self.ops):
            for q in op.qubits:
                if not 0 <= q < self.num_qubits:
                    raise CircuitError(f"op {i}: qubit {q} out of range")
            if op.kind == "measure":
                if not 0 <= op.clbit < self.num_clbits:
                    raise CircuitError(f"op {i}: classical bit {op.clbit} out of range")
                if op.clbit in written:
                    raise CircuitError(f"op {i}: classical bit {op.clbit} measured twice")
                written.add(op.clbit)
                measured.add(op.qubits[0])
            elif op.kind == "reset" and op.qubits[0] not in measured and not self.free_resets:
                raise CircuitError(f"op {i}: reset on qubit {op.qubits[0]} before any measurement")

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def measurements(self) -> list[int]:
        return [i for i, op in enumerate(self.ops) if op.kind == "measure"]

    @property
    def measured_clbits(self) -> list[int]:
        return sorted(op.clbit for op in self.ops if op.kind == "measure")

    def count(self, kind: str) -> int:
        return sum(1 for op in self.ops if op.kind == kind)

    def depth(self) -> int:
        """ASAP layer count; barriers are fences but occupy no layer."""
        level = [0] * self.num_qubits
        depth = 0
        for op in self.ops:
            start = max(level[q] for q in op.qubits)
            end = start if op.kind == "barrier" else start + 1
            for q in op.qubits:
                level[q] = end
            depth = max(depth, end)
        return depth

    def active_qubits(self) -> list[int]:
        return sorted({q for op in self.ops if op.kind != "barrier" for q in op.qubits})

    def without_barriers(self) -> "Circuit":
        return Circuit(self.num_qubits, self.num_clbits, [op for op in self.ops if op.kind != "barrier"], self.name,
                       self.free_resets)


# ---------------------------------------------------------------------------
# QASM printing and parsing

def to_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];", f"creg c[{c.num_clbits}];"]
    for op in c.ops:
        args = ",".join(f"q[{q}]" for q in op.qubits)
        if op.kind == "measure":
            lines.append(f"measure {args} -> c[{op.clbit}];")
        elif op.kind == "rz":
            lines.append(f"rz({format(op.angle, f'.{_ANGLE_DIGITS}g')}) {args};")
        else:
            lines.append(f"{op.kind} {args};")
    return "\n".join(lines) + "\n"


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_angle(text: str, line: int, col: int) -> float:
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise QasmError(f"bad angle expression {text!r}", line, col) from exc

    def ev(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise QasmError(f"unsupported angle expression {text!r}", line, col)

    try:
        return ev(tree)
    except ZeroDivisionError as exc:
        raise QasmError(f"division by zero in {text!r}", line, col) from exc


_STMT = re.compile(r"\s*([^;]*);", re.S)
_ARG = re.compile(r"^\s*([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*$")
_WHOLE = re.compile(r"^\s*([A-Za-z_]\w*)\s*$")


def _strip_comments(source: str) -> str:
    return re.sub(r"//[^\n]*", lambda m: " " * len(m.group(0)), source)


def _position(source: str, offset: int) -> tuple[int, int]:
    line = source.count("\n", 0, offset) + 1
    col = offset - (source.rfind("\n", 0, offset) + 1) + 1
    return line, col


def parse_qasm(source: str, name: str = "circuit", free_resets: bool = False) -> Circuit:
    text = _strip_comments(source)
    qreg: tuple[str, int] | None = None
    creg: tuple[str, int] | None = None
    ops: list[Op] = []
    measured: set[int] = set()
    pos = 0
    while True:
        m = _STMT.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip():
                line, col = _position(source, pos + len(rest) - len(rest.lstrip()))
                raise QasmError("missing ';'", line, col)
            break
        stmt = m.group(1).strip()
        start = m.start(1)
        line, col = _position(source, start)
        pos = m.end()
        if not stmt:
            continue
        head = re.match(r"[A-Za-z_]\w*", stmt)
        if head is None:
            raise QasmError(f"unexpected token {stmt.split()[0]!r}", line, col)
        word = head.group(0)
        if word == "OPENQASM" or word == "include":
            continue
        if word in ("qreg", "creg"):
            reg = re.fullmatch(r"(qreg|creg)\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]", stmt)
            if reg is None:
                raise QasmError(f"malformed register declaration {stmt!r}", line, col)
            decl = (reg.group(2), int(reg.group(3)))
            if word == "qreg":
                if qreg is not None:
                    raise QasmError("only one quantum register is supported", line, col)
                qreg = decl
            else:
                if creg is not None:
                    raise QasmError("only one classical register is supported", line, col)
                creg = decl
            continue
        if qreg is None:
            raise QasmError("gate before qreg declaration", line, col)

        angle = None
        rest = stmt[len(word):]
        if rest.lstrip().startswith("("):
            open_at = rest.index("(")
            close_at = rest.rfind(")")
            if close_at < open_at:
                raise QasmError("unbalanced parentheses", line, col)
            angle = _eval_angle(rest[open_at + 1:close_at], line, col)
            rest = rest[close_at + 1:]
        if word not in GATE_SET or word == "measure" and angle is not None:
            raise QasmError(f"unsupported gate {word!r}", line, col)

        def resolve(arg: str, reg: tuple[str, int] | None, kind: str) -> list[int]:
            if reg is None:
                raise QasmError(f"no {kind} register declared", line, col)
            am = _ARG.match(arg)
            if am:
                if am.group(1) != reg[0]:
                    raise QasmError(f"unknown register {am.group(1)!r}", line, col)
                idx = int(am.group(2))
                if idx >= reg[1]:
                    raise QasmError(f"index {idx} out of range for {reg[0]}[{reg[1]}]", line, col)
                return [idx]
            wm = _WHOLE.match(arg)
            if wm and wm.group(1) == reg[0]:
                return list(range(reg[1]))
            raise QasmError(f"malformed argument {arg.strip()!r}", line, col)

        try:
            if word == "measure":
                parts = rest.split("->")
                if len(parts) != 2:
                    raise QasmError("measure needs '->'", line, col)
                qs = resolve(parts[0], qreg, "quantum")
                cs = resolve(parts[1], creg, "classical")
                if len(qs) != len(cs):
                    raise QasmError("register size mismatch in measure", line, col)
                for q, cbit in zip(qs, cs):
                    if cbit in measured:
                        raise QasmError(f"classical bit {cbit} measured twice", line, col)
                    measured.add(cbit)
                    ops.append(Op("measure", (q,), clbit=cbit))
                continue
            args = [resolve(a, qreg, "quantum") for a in rest.split(",")] if rest.strip() else []
            if word == "barrier":
                qs = sorted({q for a in args for q in a})
                if not qs:
                    raise QasmError("barrier without operands", line, col)
                ops.append(Op("barrier", tuple(qs)))
            elif word in TWO_QUBIT_GATES:
                if len(args) != 2 or len(args[0]) != 1 or len(args[1]) != 1:
                    raise QasmError(f"{word} needs two single-qubit arguments", line, col)
                ops.append(Op(word, (args[0][0], args[1][0])))
            else:
                if len(args) != 1:
                    raise QasmError(f"{word} takes one argument", line, col)
                if (word == "rz") != (angle is not None):
                    raise QasmError(f"bad parameter list for {word}", line, col)
                for q in args[0]:
                    ops.append(Op(word, (q,), angle=angle))
        except CircuitError as exc:
            raise QasmError(str(exc), line, col) from exc

    if qreg is None:
        raise QasmError("no quantum register declared")
    try:
        return Circuit(qreg[1], creg[1] if creg else 0, ops, name, free_resets)
    except CircuitError as exc:
        raise QasmError(str(exc)) from exc


def load_qasm(path: str) -> Circuit:
    from pathlib import Path

    p = Path(path)
    return parse_qasm(p.read_text(encoding="utf-8"), name=p.stem)


# ---------------------------------------------------------------------------
# Benchmark generators

def generate_bv(n: int, secret: str | None = None) -> Circuit:
    """Bernstein-Vazirani with controls 0..n-2 and the target on qubit n-1.

    Only secret bits equal to 1 contribute a CX; the controls are measured
    into classical bits 0..n-2.
    """
    if n < 2:
        raise CircuitError("BV needs at least two qubits")
    if secret is None:
        secret = "1" * (n - 1)
    if len(secret) != n - 1 or set(secret) - {"0", "1"}:
        raise CircuitError(f"secret must be a bitstring of length {n - 1}")
    target = n - 1
    ops = [Op("x", (target,))]
    ops += [Op("h", (q,)) for q in range(n)]
    for i, bit in enumerate(secret):
        if bit == "1":
            ops.append(Op("cx", (i, target)))
    ops += [Op("h", (q,)) for q in range(n - 1)]
    ops += [Op("measure", (q,), clbit=q) for q in range(n - 1)]
    return Circuit(n, n - 1, ops, name=f"bv{n}")


def generate_h_ladder(n: int) -> Circuit:
    """H layer, nearest-neighbour CX chain, H layer, measure all."""
    if n < 2:
        raise CircuitError("H-ladder needs at least two qubits")
    ops = [Op("h", (q,)) for q in range(n)]
    ops += [Op("cx", (q, q + 1)) for q in range(n - 1)]
    ops += [Op("h", (q,)) for q in range(n)]
    ops += [Op("measure", (q,), clbit=q) for q in range(n)]
    return Circuit(n, n, ops, name=f"h_ladder{n}")


def builtin_circuit(spec: str) -> Circuit:
    """Resolve ``bv<n>[:<secret>]``, ``h_ladder<n>`` or ``xor5_254``."""
    m = re.fullmatch(r"bv(\d+)(?::([01]+))?", spec)
    if m:
        return generate_bv(int(m.group(1)), m.group(2))
    m = re.fullmatch(r"h_?ladder(\d+)", spec.replace("-", "_"), re.I)
    if m:
        return generate_h_ladder(int(m.group(1)))
    if spec == "xor5_254":
        from importlib.resources import files

        return parse_qasm(files("reuseq.data").joinpath("xor5_254.qasm").read_text(encoding="utf-8"), "xor5_254")
    raise CircuitError(f"unknown built-in circuit {spec!r}")


# ---------------------------------------------------------------------------
# Structure

@dataclass(frozen=True)
class DependencyDag:
    num_nodes: int
    edges: frozenset[tuple[int, int]]

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for i, j in sorted(self.edges):
            preds[j].append(i)
        return preds

    def successors(self) -> list[list[int]]:
        succs: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for i, j in sorted(self.edges):
            succs[i].append(j)
        return succs

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.num_nodes))
        g.add_edges_from(self.edges)
        return g


def build_dag(c: Circuit) -> DependencyDag:
    """Immediate-predecessor edges per qubit and per classical bit."""
    last_q: dict[int, int] = {}
    last_c: dict[int, int] = {}
    edges: set[tuple[int, int]] = set()
    for j, op in enumerate(c.ops):
        for q in op.qubits:
            if q in last_q:
                edges.add((last_q[q], j))
            last_q[q] = j
        if op.clbit is not None:
            if op.clbit in last_c:
                edges.add((last_c[op.clbit], j))
            last_c[op.clbit] = j
    return DependencyDag(len(c.ops), frozenset(edges))


def interaction_graph(c: Circuit | Iterable[Op], num_qubits: int | None = None) -> nx.Graph:
    ops = c.ops if isinstance(c, Circuit) else list(c)
    g = nx.Graph()
    if isinstance(c, Circuit):
        g.add_nodes_from(range(c.num_qubits))
    elif num_qubits is not None:
        g.add_nodes_from(range(num_qubits))
    for op in ops:
        if op.is_two_qubit:
            g.add_edge(*op.qubits)
    return g


def effective_predecessors(c: Circuit) -> list[list[int]]:
    """Immediate predecessors among non-barrier ops, with barriers resolved to
    the edges they induce. Entries for barrier ops are empty."""
    preds = build_dag(c).predecessors()
    resolved: list[list[int]] = []
    for j, op in enumerate(c.ops):
        out: set[int] = set()
        stack = list(preds[j])
        while stack:
            i = stack.pop()
            if c.ops[i].kind == "barrier":
                stack.extend(preds[i])
            else:
                out.add(i)
        resolved.append([] if op.kind == "barrier" else sorted(out))
    return resolved
