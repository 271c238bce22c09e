from ._kernels import BACKEND
from .sim import (
    MAX_QUBITS, CountsRecord, ResetNoise, SimulationError, equivalent, exact_distribution, gate_matrix,
    hellinger_fidelity, sample_counts,
)

__all__ = [
    "BACKEND", "MAX_QUBITS", "CountsRecord", "ResetNoise", "SimulationError", "equivalent",
    "exact_distribution", "gate_matrix", "hellinger_fidelity", "sample_counts",
]
