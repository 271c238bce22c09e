from .encoder import EncodingError, ReuseModel, encode
from .optimize import (
    ExtractionError, InfeasibleError, OptimalAssignment, OptimizationResult, ReuseMode, extract,
    optimize_circuit, solve,
)

__all__ = [
    "EncodingError", "ReuseModel", "encode", "ExtractionError", "InfeasibleError", "OptimalAssignment",
    "OptimizationResult", "ReuseMode", "extract", "optimize_circuit", "solve",
]
