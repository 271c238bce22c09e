"""CNF container with DIMACS import/export."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


class CnfError(ValueError):
    pass


@dataclass
class Cnf:
    num_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    allow_empty: bool = False

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def new_vars(self, n: int) -> list[int]:
        start = self.num_vars + 1
        self.num_vars += n
        return list(range(start, start + n))

    def add_clause(self, lits: Iterable[int]) -> None:
        clause = list(dict.fromkeys(int(x) for x in lits))
        if not clause and not self.allow_empty:
            raise CnfError("empty clause")
        for lit in clause:
            if lit == 0 or abs(lit) > self.num_vars:
                raise CnfError(f"literal {lit} references an undeclared variable")
        self.clauses.append(clause)

    def extend(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def copy(self) -> "Cnf":
        return Cnf(self.num_vars, [list(c) for c in self.clauses], self.allow_empty)

    def evaluate(self, assignment: dict[int, bool] | list[bool]) -> bool:
        """``assignment`` indexed by variable (list index 0 unused)."""
        def val(lit: int) -> bool:
            v = assignment[abs(lit)]
            return v if lit > 0 else not v
        return all(any(val(l) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "Cnf":
        num_vars = None
        clauses: list[list[int]] = []
        current: list[int] = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("c") or line.startswith("%"):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise CnfError(f"bad header {line!r}")
                num_vars = int(parts[2])
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(current)
                    current = []
                else:
                    current.append(lit)
        if current:
            clauses.append(current)
        if num_vars is None:
            raise CnfError("missing 'p cnf' header")
        cnf = cls(num_vars, allow_empty=True)
        cnf.extend(clauses)
        return cnf
