"""A small conflict-driven clause-learning engine.

Pure Python, meant for desk-sized formulas and as an independent cross-check
of the native backends. Supports incremental clause addition and solving
under assumptions with final-conflict cores.
"""

from __future__ import annotations

import heapq
import random
import time
from typing import Iterable, Sequence


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class CdclSolver:
    """Two-watched-literal CDCL with VSIDS, phase saving and Luby restarts."""

    def __init__(self, num_vars: int = 0, seed: int = 0):
        self.rng = random.Random(seed)
        self.nvars = 0
        self.value: list[int] = [0]      # per var: 1 true, -1 false, 0 unassigned
        self.level: list[int] = [0]
        self.reason: list[list[int] | None] = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [-1]
        self.watches: dict[int, list[list[int]]] = {}
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.ok = True
        self.conflicts = 0
        self.ensure_vars(num_vars)

    # -- setup -------------------------------------------------------------

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.nvars += 1
            v = self.nvars
            self.value.append(0)
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(self.rng.random() * 1e-5)
            self.phase.append(-1)
            self.watches[v] = []
            self.watches[-v] = []
            heapq.heappush(self.heap, (-self.activity[v], v))

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def add_clause(self, lits: Iterable[int]) -> bool:
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        clause: list[int] = []
        for lit in dict.fromkeys(int(x) for x in lits):
            self.ensure_vars(abs(lit))
            if -lit in clause:
                return True
            clause.append(lit)
        kept = []
        for lit in clause:
            val = self.lit_value(lit)
            if val == 1:
                return True
            if val == 0:
                kept.append(lit)
        if not kept:
            self.ok = False
            return False
        if len(kept) == 1:
            self._enqueue(kept[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self.clauses.append(kept)
        self._watch(kept)
        return True

    def _watch(self, clause: list[int]) -> None:
        self.watches[-clause[0]].append(clause)
        self.watches[-clause[1]].append(clause)

    # -- core loop ---------------------------------------------------------

    def _enqueue(self, lit: int, reason: list[int] | None) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> list[int] | None:
        value = self.value
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = self.watches[p]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)]
                if (fv if first > 0 else -fv) == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    vk = value[abs(lk)]
                    if (vk if lk > 0 else -vk) != -1:
                        c[1], c[k] = lk, false_lit
                        self.watches[-lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if (fv if first > 0 else -fv) == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return c
                    self._enqueue(first, c)
            del ws[j:]
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nvars + 1) if self.value[u] == 0]
            heapq.heapify(self.heap)
        if self.value[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        counter = 0
        p = 0
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        clause = confl
        while True:
            for q in clause:
                if q == p:
                    continue
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self._bump(v)
                if self.level[v] >= cur:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen.discard(abs(p))
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)]
        learnt[0] = -p
        self.var_inc *= 1.0 / 0.95
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _analyze_final(self, p: int) -> list[int]:
        """Assumptions implying ``-p`` (``p`` is a falsified assumption)."""
        core = [p]
        if not self.trail_lim:
            return core
        seen = {abs(p)}
        for i in range(len(self.trail) - 1, self.trail_lim[0] - 1, -1):
            lit = self.trail[i]
            v = abs(lit)
            if v not in seen:
                continue
            r = self.reason[v]
            if r is None:
                if self.level[v] > 0:
                    core.append(lit)
            else:
                for q in r:
                    if abs(q) != v and self.level[abs(q)] > 0:
                        seen.add(abs(q))
        return core

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else -1
            self.value[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, len(self.trail))

    def _pick_branch(self) -> int:
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.value[v] == 0:
                return v if self.phase[v] > 0 else -v
        return 0

    def solve(self, assumptions: Sequence[int] = (), budget: float | None = None) -> tuple[str, list[int]]:
        """Returns ``("SAT", [])``, ``("UNSAT", core)`` or ``("TIMEOUT", [])``."""
        if not self.ok:
            return "UNSAT", []
        for a in assumptions:
            self.ensure_vars(abs(a))
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return "UNSAT", []
        deadline = None if budget is None else time.monotonic() + budget
        restart = 0
        while True:
            limit = 100 * _luby(restart)
            restart += 1
            status, core = self._search(list(assumptions), limit, deadline)
            if status != "RESTART":
                if status != "SAT":
                    self._cancel_until(0)
                return status, core
            self._cancel_until(0)

    def _search(self, assumptions: list[int], limit: int, deadline: float | None) -> tuple[str, list[int]]:
        local = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                local += 1
                if not self.trail_lim:
                    self.ok = False
                    return "UNSAT", []
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self._watch(learnt)
                    self._enqueue(learnt[0], learnt)
                if deadline is not None and self.conflicts % 64 == 0 and time.monotonic() > deadline:
                    return "TIMEOUT", []
                continue
            if local >= limit:
                return "RESTART", []
            lit = 0
            while len(self.trail_lim) < len(assumptions):
                a = assumptions[len(self.trail_lim)]
                val = self.lit_value(a)
                if val == 1:
                    self.trail_lim.append(len(self.trail))
                elif val == -1:
                    return "UNSAT", self._analyze_final(a)
                else:
                    lit = a
                    break
            if lit == 0:
                lit = self._pick_branch()
                if lit == 0:
                    return "SAT", []
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)

    def model(self) -> list[bool]:
        """Index ``v`` holds the value of variable ``v``; index 0 unused."""
        return [False] + [self.value[v] == 1 for v in range(1, self.nvars + 1)]
