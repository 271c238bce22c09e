from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reuseq.characterization import (
    AnalysisError, analyze, generate_batch, haar_angles, interleave, prep_ops, simulate_batch, zero_overlap,
)
from reuseq.circuit import Circuit
from reuseq.simulator import CountsRecord, ResetNoise, exact_distribution


def test_zero_overlap():
    assert zero_overlap(0.0) == 1.0
    assert zero_overlap(math.pi) == pytest.approx(0.0, abs=1e-15)
    assert zero_overlap(math.pi / 2) == pytest.approx(0.5)


@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
@settings(max_examples=50, deadline=None)
def test_prep_overlap_matches_simulation(theta, phi, lam):
    from reuseq.circuit import Op
    c = Circuit(1, 1, prep_ops(0, (theta, phi, lam)) + [Op("measure", (0,), clbit=0)])
    assert exact_distribution(c).get("0", 0.0) == pytest.approx(zero_overlap(theta, phi, lam), abs=1e-9)


def test_haar_theta_distribution():
    rng = np.random.default_rng(1)
    thetas = np.array([haar_angles(rng)[0] for _ in range(20_000)])
    # density sin(theta)/2 gives a uniform cos(theta) and mean overlap 1/2
    assert np.mean(np.cos(thetas)) == pytest.approx(0.0, abs=0.02)
    assert np.mean(np.cos(thetas / 2) ** 2) == pytest.approx(0.5, abs=0.01)


def test_batch_sizes_examples():
    assert len(generate_batch("individual_random", 27, 50, 5)) == 6750
    assert len(generate_batch("simultaneous_x", 27, 3, 5)) == 5
    b = generate_batch("simultaneous_random", 2, 1, 1)
    assert len(b) == 1
    c = b.circuits[0].circuit
    assert c.count("reset") == 2 and c.count("measure") == 2 and c.count("sdg") == 2


@given(st.integers(1, 27), st.integers(1, 50), st.integers(1, 5))
@settings(max_examples=40, deadline=None)
def test_batch_size_formulas(P, W, R):
    assert len(generate_batch("individual_random", P, W, R)) == P * W * R
    assert len(generate_batch("simultaneous_random", P, W, R)) == W * R
    assert len(generate_batch("simultaneous_x", P, W, R)) == R


def test_batch_deterministic_and_ids_unique():
    a = generate_batch("individual_random", 3, 4, 2, seed=5)
    assert a.manifest() == generate_batch("individual_random", 3, 4, 2, seed=5).manifest()
    assert a.manifest() != generate_batch("individual_random", 3, 4, 2, seed=6).manifest()
    assert len({c.id for c in a.circuits}) == len(a)


def test_bad_parameters():
    with pytest.raises(ValueError):
        generate_batch("simultaneous_x", 0, 1, 1)
    with pytest.raises(ValueError):
        generate_batch("sideways", 1, 1, 1)


def test_interleave_order():
    xs = generate_batch("simultaneous_x", 2, 1, 2)
    rs = generate_batch("simultaneous_random", 2, 2, 2)
    order = interleave(rs, xs)
    keys = [(c.w, c.r, c.kind) for c in order]
    ranks = {"individual_random": 0, "simultaneous_random": 1, "simultaneous_x": 2}
    assert keys == sorted(keys, key=lambda k: (k[0], k[1], ranks[k[2]]))
    assert len(order) == len(xs) + len(rs)


def all_zero_counts(batch, shots=100):
    return [CountsRecord({"0" * len(c.qubits): shots}, shots) for c in batch.circuits]


def test_all_zero_outcomes():
    batch = generate_batch("simultaneous_random", 3, 4, 2)
    rep = analyze(batch, all_zero_counts(batch))
    assert all(s.mean == 1.0 for s in rep.stats.values())
    assert all(v == 0.0 for row in rep.reset_error().values() for v in row)
    assert rep.pearson_by_r == {}
    assert all(r == 1 for r in rep.best_r.values())


def test_noiseless_simulation_gives_unit_fidelity():
    batch = generate_batch("individual_random", 2, 3, 2, seed=2)
    rep = analyze(batch, simulate_batch(batch, 200, seed=1))
    assert all(s.mean == 1.0 for s in rep.stats.values())
    assert rep.pearson_by_r == {}


def test_misaligned_counts():
    batch = generate_batch("simultaneous_x", 2, 1, 2)
    with pytest.raises(AnalysisError):
        analyze(batch, all_zero_counts(batch)[:1])
    with pytest.raises(AnalysisError):
        analyze(batch, [CountsRecord({}, 0)] * 2)
    with pytest.raises(AnalysisError):
        analyze(batch, {"nope": CountsRecord({"00": 1}, 1), "nope2": CountsRecord({"00": 1}, 1)})


def test_injected_failure_recovered():
    batch = generate_batch("simultaneous_x", 5, 1, 1)
    rep = analyze(batch, simulate_batch(batch, 10_000, seed=4, noise=ResetNoise({3: 0.05})))
    assert rep.reset_error()[3][0] == pytest.approx(0.05, abs=0.01)
    assert rep.reset_error()[0][0] == 0.0


def test_analyze_order_invariant():
    batch = generate_batch("simultaneous_random", 2, 5, 2, seed=3)
    counts = simulate_batch(batch, 500, seed=9, noise=ResetNoise({0: 0.2, 1: 0.1}))
    by_id = {c.id: rec for c, rec in zip(batch.circuits, counts)}
    shuffled = dict(reversed(list(by_id.items())))
    a, b = analyze(batch, counts), analyze(batch, shuffled)
    assert a.to_json() == b.to_json()


def test_outlier_rate_in_range():
    batch = generate_batch("individual_random", 1, 12, 1, seed=0)
    counts = [CountsRecord({"0": 100}, 100)] * 11 + [CountsRecord({"0": 10, "1": 90}, 100)]
    rep = analyze(batch, counts)
    s = rep.stats[0, 1]
    assert s.outlier_rate == pytest.approx(1 / 12)
    assert s.min == pytest.approx(0.1) and s.max == 1.0


def test_report_csv():
    batch = generate_batch("simultaneous_x", 2, 1, 3)
    text = analyze(batch, all_zero_counts(batch)).to_csv()
    assert text.splitlines()[0] == "qubit,r1,r2,r3"
    assert len(text.splitlines()) == 3
