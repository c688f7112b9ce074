import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cutscape import ansatz as A
from cutscape.graph import GraphGenerator, ResourceCapError, WeightedGraph, energy_table, generate, ising_energy
from cutscape.landscape import (
    CLASSES,
    NotCriticalError,
    classify_all_eigenstates,
    cond_min_cuts,
    hessian_diag_at_eigenstate,
    parameters_for_cut,
    probe_critical_point,
    report_csv,
    improving_flip_witness,
    witness_index,
)
from cutscape.optimizer import minimize_fg
from cutscape.statevec import Simulator
from helpers import random_graph


def chain(n, seed):
    return generate(GraphGenerator("path-chain", n, seed=seed))


def test_chain_hessian_diagonal():
    n = 6
    g = chain(n, 1)
    a = A.path_ansatz(n)
    w = [e[2] for e in g.edges]
    for z in (0, 0b101101, 0b010010):
        diag = hessian_diag_at_eigenstate(g, a, z)
        for j in range(n - 1):
            sign = -1.0 if ((z >> j) ^ (z >> (j + 1))) & 1 else 1.0
            assert diag[j] == pytest.approx(-4 * w[j] * sign, abs=1e-12)


def test_ground_cut_has_nonnegative_diagonal():
    g = random_graph(6, 2)
    ground = int(np.argmin(energy_table(g)))
    assert np.all(hessian_diag_at_eigenstate(g, A.x_ansatz_depth(6, 2), ground) >= 0)


def test_diagonal_matches_statevector_hessian():
    rng = np.random.default_rng(3)
    for seed in range(5):
        g = random_graph(5, seed)
        a = A.random_x_ansatz(5, 8, 3, rng)
        sim = Simulator(g, a)
        for _ in range(4):
            theta = rng.integers(0, 2, a.M) * (np.pi / 2)
            z = int(np.argmax(np.abs(sim.prepare(theta))))
            np.testing.assert_allclose(np.diag(sim.hessian(theta)), hessian_diag_at_eigenstate(g, a, z), atol=1e-8)


def test_parameters_for_cut_prepares_the_cut():
    a = A.path_ansatz(5)
    sim = Simulator(None, a)
    for z in range(16):
        theta = parameters_for_cut(a, z)
        assert abs(sim.prepare(theta)[z]) == pytest.approx(1.0, abs=1e-12)
    # prefix masks never touch the last vertex alone, so its side is fixed
    assert all(parameters_for_cut(a, z) is None for z in range(16, 32))
    two_qubits_only = A.Ansatz(3, A.classical_ansatz(3).generators[:2])
    assert parameters_for_cut(two_qubits_only, 0b100) is None


@pytest.mark.parametrize("n", [3, 4, 5])
def test_no_local_optima_full_nonsymmetric(n):
    a = A.x_ansatz_full_nonsymmetric(n)
    for seed in range(20):
        s = classify_all_eigenstates(random_graph(n, seed), a)
        assert s.local_optima == 0
        assert sum(s.counts[c] for c in CLASSES) == 2 ** (n - 1)


def test_no_local_optima_chain_and_ring():
    for n in (3, 6, 10):
        for seed in range(5):
            assert classify_all_eigenstates(chain(n, seed), A.path_ansatz(n)).local_optima == 0
            cyc = generate(GraphGenerator("cycle", n, seed=seed))
            assert classify_all_eigenstates(cyc, A.ring_ansatz(n)).local_optima == 0


def test_classical_ansatz_has_traps_somewhere():
    found = 0
    for seed in range(30):
        g = random_graph(6, seed)
        s = classify_all_eigenstates(g, A.classical_ansatz(6))
        found += s.local_optima
        for z in s.witnesses["local_min"]:
            assert z not in (s.ground_cut, g.full_mask ^ s.ground_cut)
            E = ising_energy(g, z)
            assert all(ising_energy(g, z ^ (1 << j)) >= E for j in range(6))
    assert found > 0


def test_improving_flip_witness_breaks_condition():
    n = 5
    a = A.x_ansatz_full_nonsymmetric(n)
    g = random_graph(n, 4)
    s = classify_all_eigenstates(g, a, keep_reports=True)
    E_ground = ising_energy(g, s.ground_cut)
    for r in s.reports:
        if r.classification == "global_min":
            continue
        j = witness_index(a, r.cut, s.ground_cut)
        assert j is not None
        assert ising_energy(g, r.cut ^ int(a.masks[j])) == pytest.approx(E_ground, abs=1e-12)
        assert ising_energy(g, r.cut ^ int(a.masks[j])) < r.j_value
        assert improving_flip_witness(r.cut, s.ground_cut) == r.cut ^ s.ground_cut


def test_classical_local_min_set_matches_single_flip_fixed_points():
    from cutscape.flipsearch import fixed_point_set

    for seed in range(5):
        g = random_graph(7, seed)
        a = A.classical_ansatz(7)
        s = classify_all_eigenstates(g, a)
        # fixed points maximize the cut, i.e. minimize the energy
        mins = set(s.witnesses["local_min"]) | {
            z for z in range(0, 1 << 7, 2) if energy_table(g)[z] == energy_table(g).min()
        }
        assert fixed_point_set(g, a) == mins == cond_min_cuts(g, a)


def test_report_csv():
    g = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 2.0)))
    s = classify_all_eigenstates(g, A.classical_ansatz(3), keep_reports=True)
    lines = report_csv(g, s, witness=True).splitlines()
    assert lines[0] == "cut_hex,j_value,classification,witness_hex"
    assert len(lines) == 1 + 4 + 1
    assert lines[-1].startswith("# summary,global_min=1")
    assert lines[1] == "0x0,3,global_max,0x2"


def test_classification_cap():
    with pytest.raises(ResourceCapError):
        classify_all_eigenstates(random_graph(4, 0), A.classical_ansatz(4), cap=3)


def test_probe_labels():
    g = random_graph(4, 5)
    a = A.x_ansatz_depth(4, 2)
    assert probe_critical_point(g, a, np.zeros(a.M)).label == "eigenstate_config"
    path = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0)))
    theta = np.array([0.0, np.pi / 4, np.pi / 2])
    res = probe_critical_point(path, A.classical_ansatz(3), theta)
    assert res.label in ("saddle_numeric", "degenerate_flagged")
    with pytest.raises(NotCriticalError):
        probe_critical_point(g, a, np.full(a.M, 0.3))


def test_probe_after_optimization():
    rng = np.random.default_rng(6)
    for seed in range(4):
        g = random_graph(5, seed)
        a = A.x_ansatz_depth(5, 2)
        sim = Simulator(g, a)
        res = minimize_fg(sim.value_and_grad, rng.uniform(0, 2 * np.pi, a.M))
        try:
            probe = probe_critical_point(g, a, res.theta, grad_tol=1e-4)
        except NotCriticalError:
            continue
        assert probe.label in ("eigenstate_config", "saddle_numeric", "optimum_numeric", "degenerate_flagged")
        assert probe.hess_min <= probe.hess_max


@given(st.integers(3, 6), st.integers(0, 2**16))
def test_full_nonsymmetric_never_traps_property(n, seed):
    assert classify_all_eigenstates(random_graph(n, seed), A.x_ansatz_full_nonsymmetric(n)).local_optima == 0


@given(st.integers(2, 6), st.integers(0, 2**16), st.integers(0, 2**6 - 1))
def test_diagonal_identity_is_exact(n, seed, z):
    z &= (1 << n) - 1
    g = random_graph(n, seed)
    a = A.x_ansatz_depth(n, min(n, 2))
    diag = hessian_diag_at_eigenstate(g, a, z)
    for j, m in enumerate(a.masks.tolist()):
        assert diag[j] == 2 * (ising_energy(g, z ^ m) - ising_energy(g, z))
