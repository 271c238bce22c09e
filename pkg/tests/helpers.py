from __future__ import annotations

import networkx as nx

from reuseq.circuit import Circuit, generate_bv
from reuseq.mapped import MappedCircuit, StepOp, schedule_asap
from reuseq.placement import CalibrationSet, uniform_calibration
from reuseq.topology import CouplingGraph, heavy_hex_27


def identity_mapped(c: Circuit, num_physical: int | None = None) -> MappedCircuit:
    ops = [StepOp(op.kind, op.qubits, i, op.qubits, op.clbit, op.angle) for i, op in enumerate(c.ops)]
    return schedule_asap(num_physical or c.num_qubits, c.num_clbits, ops,
                         {q: q for q in range(c.num_qubits)}, c.name)


def star_mapped() -> MappedCircuit:
    """BV4 laid out on a K(1,3) with the target on the centre (qubit 3)."""
    return identity_mapped(generate_bv(4, "111"))


REGION = (10, 12, 13, 15)


def region_calibration(g: CouplingGraph | None = None) -> CalibrationSet:
    """Uniform 0.99 device with one better star: centre 12, leaves 10, 13, 15.

    Reset tables carry three repetitions with the error shrinking and the
    duration growing in r, as a characterization run would report.
    """
    g = g or heavy_hex_27()
    cal = uniform_calibration(g, 0.99, (0.08, 0.03, 0.025), (1e-6, 2e-6, 3e-6))
    region = set(REGION)
    for (kind, loc) in list(cal.gate_fidelity):
        if set(loc) <= region:
            cal.gate_fidelity[kind, loc] = 0.999
    for p in region:
        cal.measure_fidelity[p] = 0.999
        cal.reset_error[p] = [0.04, 0.01, 0.009]
    return cal


def star_graph_host() -> nx.Graph:
    return nx.star_graph(3)
