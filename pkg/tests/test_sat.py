from __future__ import annotations

import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reuseq.sat import SAT, TIMEOUT, UNSAT, Cnf, SatSolver, add_cardinality, solve_sat, sequential_counter

BACKENDS = ["embedded", "cadical195"]


def brute_sat(cnf: Cnf) -> bool:
    for bits in itertools.product([False, True], repeat=cnf.num_vars):
        if cnf.evaluate([False, *bits]):
            return True
    return False


def pigeonhole(pigeons: int, holes: int) -> Cnf:
    f = Cnf()
    x = {(i, j): f.new_var() for i in range(pigeons) for j in range(holes)}
    for i in range(pigeons):
        f.add_clause([x[i, j] for j in range(holes)])
    for j in range(holes):
        for a, b in itertools.combinations(range(pigeons), 2):
            f.add_clause([-x[a, j], -x[b, j]])
    return f


@pytest.mark.parametrize("backend", BACKENDS)
def test_tiny_cases(backend):
    f = Cnf()
    x, y = f.new_vars(2)
    f.add_clause([x, y])
    res = solve_sat(f, [-x], backend=backend)
    assert res.status == SAT and res[y] and not res[x]
    g = Cnf()
    z = g.new_var()
    g.add_clause([z])
    g.add_clause([-z])
    assert solve_sat(g, backend=backend).status == UNSAT


@pytest.mark.parametrize("backend", BACKENDS)
def test_pigeonhole(backend):
    f = pigeonhole(4, 3)
    assert f.num_vars <= 20 and not brute_sat(f)
    assert solve_sat(f, backend=backend).status == UNSAT
    assert solve_sat(pigeonhole(3, 3), backend=backend).status == SAT


def test_empty_clause_and_undeclared_literal_rejected():
    f = Cnf()
    with pytest.raises(ValueError):
        f.add_clause([])
    with pytest.raises(ValueError):
        f.add_clause([3])


def test_dimacs_round_trip():
    f = pigeonhole(3, 2)
    g = Cnf.from_dimacs(f.to_dimacs())
    assert g.num_vars == f.num_vars and g.clauses == f.clauses


def test_budget_timeout():
    res = solve_sat(pigeonhole(11, 10), budget=0.05, backend="embedded")
    assert res.status == TIMEOUT


@pytest.mark.parametrize("backend", BACKENDS)
def test_core_is_unsat_with_base(backend):
    f = Cnf()
    a, b, c = f.new_vars(3)
    f.add_clause([-a, -b])
    with SatSolver(f, backend=backend) as s:
        res = s.solve([a, b, c])
    assert res.status == UNSAT
    assert set(res.core) <= {a, b, c}
    assert solve_sat(f, res.core, backend=backend).status == UNSAT


@st.composite
def small_cnf(draw):
    n = draw(st.integers(1, 10))
    f = Cnf(n)
    for _ in range(draw(st.integers(1, 40))):
        lits = draw(st.lists(st.integers(1, n), min_size=1, max_size=3, unique=True))
        f.add_clause([v if draw(st.booleans()) else -v for v in lits])
    return f


@given(small_cnf(), st.sampled_from(BACKENDS))
@settings(max_examples=120, deadline=None)
def test_agrees_with_truth_table(f, backend):
    res = solve_sat(f, backend=backend)
    assert (res.status == SAT) == brute_sat(f)
    if res.status == SAT:
        assert f.evaluate(res.model)


def model_count(cnf: Cnf, originals: list[int]) -> int:
    count = 0
    for bits in itertools.product([False, True], repeat=len(originals)):
        assumptions = [v if b else -v for v, b in zip(originals, bits)]
        if solve_sat(cnf, assumptions).status == SAT:
            count += 1
    return count


def test_cardinality_model_counts():
    f = Cnf()
    xs = f.new_vars(5)
    add_cardinality(f, xs, 2)
    assert model_count(f, xs) == comb(5, 0) + comb(5, 1) + comb(5, 2) == 16
    f0 = Cnf()
    ys = f0.new_vars(3)
    add_cardinality(f0, ys, 0)
    assert model_count(f0, ys) == 1
    full = Cnf()
    zs = full.new_vars(3)
    add_cardinality(full, zs, 3)
    assert model_count(full, zs) == 8


@given(st.integers(1, 6), st.data())
@settings(max_examples=40, deadline=None)
def test_cardinality_projection(n, data):
    k = data.draw(st.integers(0, n))
    f = Cnf()
    xs = f.new_vars(n)
    add_cardinality(f, xs, k)
    assert model_count(f, xs) == sum(comb(n, j) for j in range(k + 1))


def test_exact_counter_outputs():
    f = Cnf()
    xs = f.new_vars(4)
    outs = sequential_counter(f, xs, 4, exact=True)
    for bits in itertools.product([False, True], repeat=4):
        res = solve_sat(f, [v if b else -v for v, b in zip(xs, bits)])
        assert [res[o] for o in outs] == [sum(bits) >= j for j in range(1, 5)]
