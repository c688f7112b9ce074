import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutscape.graph import GraphGenerator, WeightedGraph, cut_value, generate, max_cut_bruteforce, unweighted
from cutscape.gwbaseline import GwConfig, gw_maxcut, relaxation_value, round_hyperplanes, solve_relaxation
from helpers import random_graph

C4 = WeightedGraph(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)))


def regular(n, k, seed, weights=(0.0, 5.0)):
    return generate(GraphGenerator("k-regular", n, weights, seed, k))


def test_single_edge():
    res = gw_maxcut(WeightedGraph(2, ((0, 1, 1.0),)))
    assert res.value == 1.0 and res.relaxation == pytest.approx(1.0, abs=1e-9)
    assert res.converged


def test_four_cycle():
    res = gw_maxcut(C4, GwConfig(rounding_trials=100, seed=3))
    assert res.value == 4.0 and res.cut in (0b0101, 0b1010)


def test_value_is_the_returned_cut():
    g = random_graph(7, 2)
    res = gw_maxcut(g, GwConfig(seed=1))
    assert res.value == cut_value(g, res.cut)
    assert res.value <= max_cut_bruteforce(g)[0]


def test_three_regular_twenty_vertices():
    good = 0
    for seed in range(100):
        g = unweighted(regular(20, 3, 1000 + seed))
        best = max_cut_bruteforce(g)[0]
        good += gw_maxcut(g, GwConfig(seed=seed)).value >= 0.8 * best
    assert good >= 95


def test_relaxation_is_monotone():
    g = random_graph(10, 4)
    _, f, _, _, history = solve_relaxation(g, GwConfig(), np.random.default_rng(0))
    assert all(b >= a for a, b in zip(history, history[1:]))
    assert history[-1] == f


def test_best_of_rounding_is_monotone():
    g = random_graph(9, 5)
    V, *_ = solve_relaxation(g, GwConfig(), np.random.default_rng(1))
    _, best, running = round_hyperplanes(g, V, 50, np.random.default_rng(2))
    assert all(b >= a for a, b in zip(running, running[1:]))
    assert best == running[-1]
    # same stream, more trials: the first 10 rounds are a prefix of the first 50
    _, best10, _ = round_hyperplanes(g, V, 10, np.random.default_rng(2))
    assert best10 <= best


def test_relaxation_value_of_a_cut_embedding():
    g = random_graph(6, 6)
    z = 0b101100
    V = np.zeros((6, 2))
    V[:, 0] = [1 - 2 * ((z >> a) & 1) for a in range(6)]
    assert relaxation_value(g, V) == pytest.approx(cut_value(g, z), abs=1e-12)


def test_determinism_and_config_checks():
    g = random_graph(8, 7)
    a, b = gw_maxcut(g, GwConfig(seed=9)), gw_maxcut(g, GwConfig(seed=9))
    assert (a.cut, a.value, a.relaxation) == (b.cut, b.value, b.relaxation)
    with pytest.raises(ValueError):
        GwConfig(rank=1)
    with pytest.raises(ValueError):
        GwConfig(rounding_trials=0)
    with pytest.raises(ValueError):
        gw_maxcut(WeightedGraph(1, ()))


def test_iteration_cap_flags_nonconvergence():
    res = gw_maxcut(random_graph(12, 8), GwConfig(descent_iters=1, tol=1e-15))
    assert not res.converged and res.value == cut_value(random_graph(12, 8), res.cut)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**16))
def test_sandwich(n, seed):
    g = random_graph(n, seed)
    best = max_cut_bruteforce(g)[0]
    res = gw_maxcut(g, GwConfig(seed=seed, rounding_trials=20))
    assert res.value <= best
    # the low-rank ascent is not certified optimal, so allow a hair below MaxCut
    assert res.relaxation >= best - 1e-6 * max(g.total_weight, 1.0)
