from .cardinality import add_cardinality, at_most_one, exactly_one, sequential_counter
from .cnf import Cnf, CnfError
from .engine import SAT, TIMEOUT, UNSAT, SatResult, SatSolver, solve_sat

__all__ = [
    "Cnf", "CnfError", "SatResult", "SatSolver", "solve_sat", "add_cardinality",
    "at_most_one", "exactly_one", "sequential_counter", "SAT", "UNSAT", "TIMEOUT",
]
