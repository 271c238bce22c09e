"""Cardinality encodings: at-most-one and the sequential counter."""

from __future__ import annotations

from typing import Sequence

from .cnf import Cnf

PAIRWISE_LIMIT = 6


def at_most_one(cnf: Cnf, lits: Sequence[int]) -> None:
    lits = list(lits)
    n = len(lits)
    if n <= 1:
        return
    if n < PAIRWISE_LIMIT:
        for i in range(n):
            for j in range(i + 1, n):
                cnf.add_clause([-lits[i], -lits[j]])
        return
    # ladder: s[i] <=> some of lits[0..i] is true
    s = cnf.new_vars(n - 1)
    cnf.add_clause([-lits[0], s[0]])
    for i in range(1, n - 1):
        cnf.add_clause([-lits[i], s[i]])
        cnf.add_clause([-s[i - 1], s[i]])
        cnf.add_clause([-lits[i], -s[i - 1]])
    cnf.add_clause([-lits[n - 1], -s[n - 2]])


def exactly_one(cnf: Cnf, lits: Sequence[int]) -> None:
    cnf.add_clause(lits)
    at_most_one(cnf, lits)


def sequential_counter(cnf: Cnf, lits: Sequence[int], k: int, exact: bool = False) -> list[int]:
    """Unary count outputs ``out[j-1]`` that are forced true when at least ``j`` of ``lits`` hold.

    With ``exact=True`` the reverse implications are added as well, so
    ``out[j-1]`` is true iff at least ``j`` literals hold; that is needed for
    lower bounds. Returns ``k`` output literals (fewer if ``len(lits) < k``).
    """
    lits = list(lits)
    n = len(lits)
    k = min(k, n)
    if k <= 0 or n == 0:
        return []
    prev: list[int] = []
    for i, x in enumerate(lits):
        width = min(k, i + 1)
        cur = cnf.new_vars(width)
        cnf.add_clause([-x, cur[0]])
        for j in range(width):
            if j < len(prev):
                cnf.add_clause([-prev[j], cur[j]])
            if j >= 1:
                cnf.add_clause([-x, -prev[j - 1], cur[j]])
        if exact:
            for j in range(width):
                keep = [prev[j]] if j < len(prev) else []
                if j == 0:
                    cnf.add_clause([-cur[0], x] + keep)
                else:
                    cnf.add_clause([-cur[j], x] + keep)
                    cnf.add_clause([-cur[j], prev[j - 1]] + keep)
        prev = cur
    return prev


def add_cardinality(cnf: Cnf, lits: Sequence[int], bound: int) -> Cnf:
    """Constrain at most ``bound`` of ``lits`` to be true (in place; returns ``cnf``)."""
    lits = list(lits)
    if bound < 0 or bound > len(lits):
        raise ValueError(f"bound {bound} outside 0..{len(lits)}")
    if bound == len(lits):
        return cnf
    if bound == 0:
        for x in lits:
            cnf.add_clause([-x])
        return cnf
    out = sequential_counter(cnf, lits, bound + 1)
    cnf.add_clause([-out[bound]])
    return cnf
