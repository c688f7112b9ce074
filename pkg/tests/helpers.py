"""Independent oracles shared by the test modules.

Dense matrices are built from Kronecker products and scipy's expm, so they
share no code path with the package's gate kernels.
"""
from functools import reduce

import numpy as np
from scipy.linalg import expm

from cutscape.graph import GraphGenerator, WeightedGraph, generate

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def pauli(n, qubits, op):
    # qubit a is bit a of the index, so it sits at the right end of the kron chain
    factors = [op if q in qubits else I2 for q in reversed(range(n))]
    return reduce(np.kron, factors)


def mask_qubits(mask):
    return {i for i in range(mask.bit_length()) if (mask >> i) & 1}


def problem_matrix(g: WeightedGraph):
    n = g.n_vertices
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    for a, b, w in g.edges:
        H += w * pauli(n, {a}, Z) @ pauli(n, {b}, Z)
    return H


def generator_matrix(gen, n, g=None):
    if gen.kind in ("x_string", "local_x_layer_element"):
        return pauli(n, mask_qubits(gen.mask), X)
    if gen.kind == "z_string":
        return pauli(n, mask_qubits(gen.mask), Z)
    if gen.kind == "global_x_mixer":
        return sum(pauli(n, {i}, X) for i in range(n))
    if gen.kind == "global_z_layer":
        return sum(pauli(n, {i}, Z) for i in range(n))
    return problem_matrix(g)


def dense_state(ansatz, theta, g=None):
    n = ansatz.n_qubits
    N = 1 << n
    if ansatz.initial_state == "all_plus":
        psi = np.full(N, 1 / np.sqrt(N), dtype=complex)
    else:
        psi = np.zeros(N, dtype=complex)
        psi[0] = 1
    for gen, t in zip(ansatz.generators, theta):
        psi = expm(-1j * t * generator_matrix(gen, n, g)) @ psi
    return psi


def dense_objective(g, ansatz, theta):
    psi = dense_state(ansatz, theta, g)
    return float(np.real(np.conj(psi) @ problem_matrix(g) @ psi))


def fd_gradient(f, theta, h=1e-5):
    theta = np.asarray(theta, dtype=float)
    out = np.empty(theta.size)
    for k in range(theta.size):
        e = np.zeros(theta.size)
        e[k] = h
        out[k] = (f(theta + e) - f(theta - e)) / (2 * h)
    return out


def fd_hessian(f, theta, h=1e-4):
    theta = np.asarray(theta, dtype=float)
    M = theta.size
    H = np.empty((M, M))
    for j in range(M):
        for k in range(M):
            ej, ek = np.zeros(M), np.zeros(M)
            ej[j], ek[k] = h, h
            H[j, k] = (f(theta + ej + ek) - f(theta + ej - ek) - f(theta - ej + ek) + f(theta - ej - ek)) / (4 * h * h)
    return H


def random_graph(n, seed, kind="complete", k=None):
    return generate(GraphGenerator(kind, n, seed=seed, k=k))


def cut_value_edgewise(g, s):
    """Second cut implementation: explicit per-edge XOR test."""
    total = 0.0
    for a, b, w in g.edges:
        if ((s >> a) & 1) != ((s >> b) & 1):
            total += w
    return total


def gf2_rank(vectors):
    basis = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)
