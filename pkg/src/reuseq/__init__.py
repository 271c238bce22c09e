"""Exact qubit mapping with mid-circuit qubit reuse."""

from __future__ import annotations

from .circuit import Circuit, CircuitError, Op, QasmError, builtin_circuit, load_qasm, parse_qasm, to_qasm
from .mapped import MappedCircuit, check_valid
from .mapper import InfeasibleError, OptimizationResult, ReuseMode, optimize_circuit
from .topology import CouplingGraph, load_topology, preset

__version__ = "0.1.0"

__all__ = [
    "Circuit", "CircuitError", "CouplingGraph", "InfeasibleError", "MappedCircuit", "Op",
    "OptimizationResult", "QasmError", "ReuseMode", "builtin_circuit", "check_valid", "load_qasm",
    "load_topology", "optimize_circuit", "parse_qasm", "preset", "to_qasm", "__version__",
]
