from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import min_swaps, random_circuit
from reuseq.circuit import Circuit, Op, generate_bv, generate_h_ladder
from reuseq.mapped import check_valid
from reuseq.router import RoutingError, best_route, depth_bound, route_greedy, serialization_cap
from reuseq.simulator import equivalent
from reuseq.topology import heavy_hex_27, line, preset


def test_ladder_on_line_needs_no_swaps():
    # root 1 holds the highest-degree ladder qubit, so the path lays out in order
    assert route_greedy(generate_h_ladder(5), line(5), 1).swap_count == 0
    assert best_route(generate_h_ladder(5), line(5)).swap_count == 0


def test_single_qubit_circuit_needs_no_swaps():
    c = Circuit(3, 0, [Op("h", (0,)), Op("x", (2,)), Op("t", (1,))])
    assert best_route(c, line(3)).swap_count == 0


def test_star_on_path_needs_a_swap():
    c = generate_bv(4, "111")
    assert min_swaps(c, line(4)) >= 1
    assert route_greedy(c, line(4), 0).swap_count >= 1


def test_too_many_logical_qubits():
    with pytest.raises(RoutingError):
        route_greedy(generate_bv(4), line(3), 0)


def test_depth_bounds():
    c = generate_h_ladder(3)
    assert depth_bound(c, line(3), False) == best_route(c, line(3)).depth
    one = Circuit(2, 1, [Op("h", (0,)), Op("measure", (0,), clbit=0)])
    base = best_route(one, line(2)).depth
    assert depth_bound(one, line(2), True) == min(base + 1, serialization_cap(one, line(2)))


def test_deterministic():
    c = generate_bv(7)
    a = route_greedy(c, heavy_hex_27(), 3)
    b = route_greedy(c, heavy_hex_27(), 3)
    assert a.mapped == b.mapped


@given(st.integers(2, 5), st.integers(1, 8), st.integers(0, 10_000), st.sampled_from(["line5", "t5", "ring5"]))
@settings(max_examples=40, deadline=None)
def test_routed_output_valid_and_equivalent(nq, ncx, seed, host):
    c = random_circuit(nq, ncx, seed)
    g = preset(host)
    r = best_route(c, g)
    assert check_valid(r.mapped, g, c).ok
    assert equivalent(c, r.mapped)[0]
    assert depth_bound(c, g, True) >= depth_bound(c, g, False)
