import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cutscape.graph import (
    GraphError,
    GraphGenerator,
    ResourceCapError,
    WeightedGraph,
    complement,
    cut_table,
    cut_value,
    energy_table,
    format_graph,
    generate,
    ising_energy,
    max_cut_bruteforce,
    parse_graph,
    read_graph,
    write_graph,
)
from helpers import cut_value_edgewise, random_graph

TRIANGLE = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    ws = draw(st.lists(st.floats(0, 5, allow_nan=False), min_size=len(pairs), max_size=len(pairs)))
    return WeightedGraph(n, tuple((a, b, w) for (a, b), k, w in zip(pairs, keep, ws) if k))


def test_triangle_singleton_cut():
    assert cut_value(TRIANGLE, 0b001) == 2.0


def test_empty_cut_is_zero():
    g = random_graph(6, 1)
    assert cut_value(g, 0) == 0.0


def test_cut_value_matches_edgewise_oracle():
    g = random_graph(5, 11)
    rng = np.random.default_rng(0)
    for s in rng.integers(0, 32, 20):
        assert cut_value(g, int(s)) == cut_value_edgewise(g, int(s))


def test_ising_energy_basics():
    g = random_graph(6, 2)
    assert ising_energy(g, 0) == pytest.approx(g.total_weight, abs=1e-12)
    for z in range(64):
        assert ising_energy(g, z) == ising_energy(g, complement(g, z))
        assert ising_energy(g, z) == pytest.approx(g.total_weight - 2 * cut_value(g, z), abs=1e-12)


def test_energy_table_matches_scalar_route_exactly():
    g = random_graph(6, 3)
    E = energy_table(g)
    assert all(E[z] == ising_energy(g, z) for z in range(64))


def test_bruteforce_small_cases():
    val, arg = max_cut_bruteforce(TRIANGLE)
    assert val == 2.0 and bin(arg).count("1") in (1, 2)
    path = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 2.0)))
    assert max_cut_bruteforce(path) == (3.0, 0b010)


def test_bruteforce_agrees_with_energy_scan():
    g = random_graph(8, 5)
    val, arg = max_cut_bruteforce(g)
    E = energy_table(g)
    assert val == pytest.approx((g.total_weight - E.min()) / 2, abs=1e-12)
    assert cut_value(g, arg) == val
    assert arg & 1 == 0


def test_bruteforce_tie_break_lowest():
    g = WeightedGraph(4, ())
    assert max_cut_bruteforce(g) == (0.0, 0)


def test_bruteforce_cap():
    with pytest.raises(ResourceCapError):
        max_cut_bruteforce(WeightedGraph(25, ()))


def test_generate_deterministic_and_shapes():
    gen = GraphGenerator("complete", 8, (0, 5), seed=7)
    g1, g2 = generate(gen), generate(gen)
    assert g1.edges == g2.edges
    assert len(g1.edges) == 28
    assert all(0 <= w <= 5 for _, _, w in g1.edges)
    chain = generate(GraphGenerator("path-chain", 5, seed=1))
    assert [(a, b) for a, b, _ in chain.edges] == [(j, j + 1) for j in range(4)]
    reg = generate(GraphGenerator("k-regular", 30, seed=2, k=3))
    assert set(reg.degrees().tolist()) == {3}
    cyc = generate(GraphGenerator("cycle", 6, seed=3))
    assert set(cyc.degrees().tolist()) == {2}


@pytest.mark.parametrize("k", [2, 5, 10])
def test_regular_graphs_at_larger_degree(k):
    g = generate(GraphGenerator("k-regular", 20, seed=k, k=k))
    assert set(g.degrees().tolist()) == {k}
    assert len(g.edges) == 10 * k


def test_generator_rejects_bad_input():
    with pytest.raises(GraphError):
        GraphGenerator("star", 4)
    with pytest.raises(GraphError):
        generate(GraphGenerator("k-regular", 5, k=3))
    with pytest.raises(GraphError):
        WeightedGraph(3, ((0, 0, 1.0),))
    with pytest.raises(GraphError):
        WeightedGraph(3, ((0, 1, -1.0),))
    with pytest.raises(GraphError):
        WeightedGraph(3, ((0, 1, 1.0), (1, 0, 2.0)))
    with pytest.raises(GraphError):
        cut_value(TRIANGLE, 0b1000)


def test_file_round_trip(tmp_path):
    g = random_graph(7, 9)
    path = tmp_path / "g.txt"
    write_graph(g, path)
    assert read_graph(path) == g
    assert format_graph(parse_graph(format_graph(g))) == format_graph(g)
    assert format_graph(g).splitlines()[0] == "7 21"


@pytest.mark.parametrize("text", ["", "3\n", "2 1\n0 1\n", "2 2\n0 1 1.0\n", "2 1\n0 5 1.0\n", "x y\n"])
def test_parse_rejects_malformed(text):
    with pytest.raises(GraphError):
        parse_graph(text)


@given(graphs(), st.integers(0, 2**7 - 1))
def test_cut_decomposes_total_weight(g, s):
    s &= g.full_mask
    uncut = sum(w for a, b, w in g.edges if ((s >> a) & 1) == ((s >> b) & 1))
    assert cut_value(g, s) + uncut == pytest.approx(g.total_weight, abs=1e-9)
    assert ising_energy(g, s) == ising_energy(g, complement(g, s))


@given(graphs())
def test_bruteforce_equals_energy_minimum(g):
    val, _ = max_cut_bruteforce(g)
    assert val == pytest.approx((g.total_weight - energy_table(g).min()) / 2, abs=1e-9)
    assert val == cut_table(g).max()
