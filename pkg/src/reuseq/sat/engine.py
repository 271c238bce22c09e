"""Incremental SAT facade over the embedded engine or a pysat backend."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cdcl import CdclSolver
from .cnf import Cnf

log = logging.getLogger(__name__)

SAT, UNSAT, TIMEOUT = "SAT", "UNSAT", "TIMEOUT"
DEFAULT_BACKEND = os.environ.get("REUSEQ_SAT_BACKEND", "cadical195")
CONFLICT_SLICE = 5000


@dataclass
class SatResult:
    status: str
    model: list[bool] = field(default_factory=list)
    core: list[int] = field(default_factory=list)

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    def __getitem__(self, lit: int) -> bool:
        v = self.model[abs(lit)] if abs(lit) < len(self.model) else False
        return v if lit > 0 else not v


def _pysat_available(name: str) -> bool:
    try:
        from pysat.solvers import SolverNames
    except ImportError:
        return False
    return hasattr(SolverNames, name)


class SatSolver:
    """One engine instance; clauses are added incrementally.

    ``backend="embedded"`` uses :class:`CdclSolver`; any pysat solver name
    (``cadical195``, ``glucose4``, ...) uses that native engine. The pysat
    engines ignore ``seed`` (they are deterministic on identical input).
    """

    def __init__(self, cnf: Cnf | None = None, backend: str | None = None, seed: int = 0):
        backend = backend or DEFAULT_BACKEND
        if backend != "embedded" and not _pysat_available(backend):
            log.warning("pysat backend %r unavailable, falling back to the embedded engine", backend)
            backend = "embedded"
        self.backend = backend
        self.seed = seed
        self.num_vars = 0
        self._synced = 0
        if backend == "embedded":
            self._engine = CdclSolver(seed=seed)
        else:
            from pysat.solvers import Solver

            self._engine = Solver(name=backend)
        if cnf is not None:
            self.add_cnf(cnf)

    def add_clause(self, lits: Sequence[int]) -> None:
        if lits:
            self.num_vars = max(self.num_vars, max(abs(x) for x in lits))
        if self.backend == "embedded":
            self._engine.add_clause(lits)
        else:
            self._engine.add_clause(list(lits))

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def add_cnf(self, cnf: Cnf) -> None:
        self.num_vars = max(self.num_vars, cnf.num_vars)
        if self.backend == "embedded":
            self._engine.ensure_vars(cnf.num_vars)
            for c in cnf.clauses:
                self._engine.add_clause(c)
        else:
            self._engine.append_formula(cnf.clauses)

    def sync(self, cnf: Cnf) -> None:
        """Send the clauses appended to ``cnf`` since the previous sync."""
        self.num_vars = max(self.num_vars, cnf.num_vars)
        if self.backend == "embedded":
            self._engine.ensure_vars(cnf.num_vars)
        self.add_clauses(cnf.clauses[self._synced:])
        self._synced = len(cnf.clauses)

    def solve(self, assumptions: Sequence[int] = (), budget: float | None = None) -> SatResult:
        assumptions = [int(a) for a in assumptions]
        if self.backend == "embedded":
            status, core = self._engine.solve(assumptions, budget)
            if status == SAT:
                return SatResult(SAT, self._engine.model())
            return SatResult(status, core=core)
        if budget is None:
            answer = self._engine.solve(assumptions=assumptions)
        else:
            # conflict-budget slices with a wall-clock check in between; not every
            # native engine supports asynchronous interruption
            deadline = time.monotonic() + max(budget, 0.0)
            while True:
                self._engine.conf_budget(CONFLICT_SLICE)
                answer = self._engine.solve_limited(assumptions=assumptions)
                if answer is not None or time.monotonic() >= deadline:
                    break
        if answer is None:
            return SatResult(TIMEOUT)
        if answer:
            model = [False] * (self.num_vars + 1)
            for lit in self._engine.get_model() or []:
                if lit > 0 and lit <= self.num_vars:
                    model[lit] = True
            return SatResult(SAT, model)
        return SatResult(UNSAT, core=list(self._engine.get_core() or []))

    def close(self) -> None:
        if self.backend != "embedded":
            self._engine.delete()

    def __enter__(self) -> "SatSolver":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def solve_sat(f: Cnf, assumptions: Sequence[int] = (), budget: float | None = None,
              seed: int = 0, backend: str | None = None) -> SatResult:
    with SatSolver(f, backend=backend, seed=seed) as s:
        s.num_vars = max(s.num_vars, f.num_vars)
        return s.solve(assumptions, budget)
