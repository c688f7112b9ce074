"""Dense statevector engine: state preparation, objective, gradient and Hessian.

Qubit ``a`` is bit ``a`` of the basis index. Every generator squares to the
identity or is diagonal, so no matrix is ever formed.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ansatz import Ansatz
from .graph import ResourceCapError, WeightedGraph, cut_value, energy_table

DENSE_CAP = 20
HESSIAN_CAP = 1024
FAST_TABLE_CAP = 1 << 23  # entries of the M x 2^n sign table
STATE_MAGIC = b"CSVEC\x00"


class StateError(ValueError):
    pass


class StateCapError(ResourceCapError):
    pass


def popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    c = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        c += x & 1
        x = x >> 1
    return c


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis."""
    a = np.array(a, copy=True)
    N = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < N:
        a = a.reshape(*lead, N // (2 * h), 2, h)
        x, y = a[..., 0, :], a[..., 1, :]
        a = np.stack((x + y, x - y), axis=-2)
        h *= 2
    return a.reshape(*lead, N)


def initial_state(ansatz: Ansatz) -> np.ndarray:
    N = 1 << ansatz.n_qubits
    if ansatz.initial_state == "all_plus":
        return np.full(N, 1 / np.sqrt(N), dtype=complex)
    psi = np.zeros(N, dtype=complex)
    psi[0] = 1.0
    return psi


@dataclass
class Simulator:
    """Precomputed tables binding one ansatz to one problem Hamiltonian.

    Holds the scratch buffers of a gradient evaluation, so an instance must not
    be shared between concurrent callers.
    """

    graph: WeightedGraph | None
    ansatz: Ansatz
    energies: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.ansatz.n_qubits
        if n > DENSE_CAP:
            raise StateCapError(f"dense statevector limited to n<={DENSE_CAP} qubits, got {n}")
        if self.graph is not None and self.graph.n_vertices != n:
            raise StateError(f"graph has {self.graph.n_vertices} vertices, ansatz {n} qubits")
        kinds = {g.kind for g in self.ansatz.generators}
        if self.graph is None and "problem_phase" in kinds:
            raise StateError("problem_phase generator needs a graph")
        N = 1 << n
        self.index = np.arange(N, dtype=np.int64)
        self.energies = energy_table(self.graph) if self.graph is not None else None
        pc = popcount(self.index)
        self.z_layer = (n - 2 * pc).astype(float)
        self._zsign = {}
        for gen in self.ansatz.generators:
            if gen.kind == "z_string" and gen.mask not in self._zsign:
                self._zsign[gen.mask] = 1.0 - 2.0 * (popcount(self.index & gen.mask) & 1)
        self.fast = self.ansatz.is_x_ansatz
        if self.fast:
            if self.ansatz.M * N > FAST_TABLE_CAP:
                raise StateCapError(f"{self.ansatz.M} x 2^{n} sign table exceeds cap {FAST_TABLE_CAP}")
            masks = self.ansatz.masks
            self.masks = masks
            self.walsh_signs = 1.0 - 2.0 * (popcount(masks[:, None] & self.index[None, :]) & 1)
        else:
            self._encode()

    def _encode(self):
        """Gate table for the compiled sweeps."""
        gens = self.ansatz.generators
        codes = np.empty(len(gens), dtype=np.int64)
        masks = np.zeros(len(gens), dtype=np.int64)
        rows = np.zeros(len(gens), dtype=np.int64)
        diags, row_of = [np.zeros(1 << self.ansatz.n_qubits)], {}
        for j, gen in enumerate(gens):
            if gen.kind in ("x_string", "local_x_layer_element"):
                codes[j], masks[j] = _kernels.X_STRING, gen.mask
            elif gen.kind == "global_x_mixer":
                codes[j] = _kernels.X_SUM
            else:
                key = (gen.kind, gen.mask if gen.kind == "z_string" else 0)
                if key not in row_of:
                    row_of[key] = len(diags)
                    diags.append(self._diag(gen))
                codes[j], rows[j] = _kernels.DIAGONAL, row_of[key]
        diags = np.array(diags)
        levels = [np.unique(d, return_inverse=True) for d in diags]
        width = max(len(u) for u, _ in levels)
        level_vals = np.zeros((len(diags), width))
        for r, (u, _) in enumerate(levels):
            level_vals[r, : len(u)] = u
        level_of = np.array([inv for _, inv in levels], dtype=np.int64)
        n_levels = np.array([len(u) for u, _ in levels], dtype=np.int64)
        tables = (diags, level_vals, level_of, n_levels)
        self._table = (codes, masks, rows, tables, self.ansatz.n_qubits)
        self._psi0 = initial_state(self.ansatz)

    # -- gates ---------------------------------------------------------------

    def _diag(self, gen) -> np.ndarray:
        if gen.kind == "z_string":
            return self._zsign[gen.mask]
        if gen.kind == "problem_phase":
            return self.energies
        return self.z_layer

    def apply_gate(self, gen, theta: float, psi: np.ndarray) -> np.ndarray:
        """exp(-i theta G) psi."""
        kind = gen.kind
        if kind in ("x_string", "local_x_layer_element"):
            return np.cos(theta) * psi - 1j * np.sin(theta) * psi[self.index ^ gen.mask]
        if kind == "global_x_mixer":
            c, s = np.cos(theta), np.sin(theta)
            for i in range(self.ansatz.n_qubits):
                psi = c * psi - 1j * s * psi[self.index ^ (1 << i)]
            return psi
        return np.exp(-1j * theta * self._diag(gen)) * psi

    def apply_generator(self, gen, psi: np.ndarray) -> np.ndarray:
        """G psi."""
        kind = gen.kind
        if kind in ("x_string", "local_x_layer_element"):
            return psi[self.index ^ gen.mask]
        if kind == "global_x_mixer":
            out = np.zeros_like(psi)
            for i in range(self.ansatz.n_qubits):
                out += psi[self.index ^ (1 << i)]
            return out
        return self._diag(gen) * psi

    # -- evaluation ----------------------------------------------------------

    def _check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.ansatz.M,):
            raise StateError(f"expected {self.ansatz.M} parameters, got shape {theta.shape}")
        return theta

    def prepare(self, theta) -> np.ndarray:
        theta = self._check_theta(theta)
        if self.fast:
            # commuting X strings are diagonal in the Hadamard basis
            phase = theta @ self.walsh_signs
            return fwht(np.exp(-1j * phase)) / self.index.size
        return _kernels.forward(*self._table, theta, self._psi0)

    def prepare_gatewise(self, theta) -> np.ndarray:
        """Gate-by-gate numpy preparation, the reference for the compiled path."""
        theta = self._check_theta(theta)
        psi = initial_state(self.ansatz)
        for gen, t in zip(self.ansatz.generators, theta):
            psi = self.apply_gate(gen, t, psi)
        return psi

    def objective(self, theta) -> float:
        psi = self.prepare(theta)
        return float(np.dot(np.abs(psi) ** 2, self.energies))

    def value_and_grad(self, theta) -> tuple[float, np.ndarray]:
        theta = self._check_theta(theta)
        E = self.energies
        if not self.fast:
            J, grad = _kernels.value_and_grad(*self._table, theta, self._psi0, E)
            return float(J), grad
        psi = self.prepare(theta)
        J = float(np.dot(np.abs(psi) ** 2, E))
        # d_j J = 2 Im <phi| H_p H_j |phi>, H_j commutes through U
        shifted = psi[self.index[None, :] ^ self.masks[:, None]]
        return J, 2.0 * np.imag(shifted @ np.conj(E * psi))

    def value_and_grad_gatewise(self, theta) -> tuple[float, np.ndarray]:
        """Adjoint sweep in numpy, one gate at a time."""
        theta = self._check_theta(theta)
        psi = self.prepare_gatewise(theta)
        E = self.energies
        J = float(np.dot(np.abs(psi) ** 2, E))
        lam = E * psi
        grad = np.empty(self.ansatz.M)
        gens = self.ansatz.generators
        for j in range(self.ansatz.M - 1, -1, -1):
            grad[j] = 2.0 * np.imag(np.vdot(lam, self.apply_generator(gens[j], psi)))
            psi = self.apply_gate(gens[j], -theta[j], psi)
            lam = self.apply_gate(gens[j], -theta[j], lam)
        return J, grad

    def gradient(self, theta) -> np.ndarray:
        return self.value_and_grad(theta)[1]

    def hessian(self, theta, h: float = 1e-4, cap: int = HESSIAN_CAP) -> np.ndarray:
        theta = self._check_theta(theta)
        M = self.ansatz.M
        if M > cap:
            raise StateCapError(f"Hessian of size {M}x{M} exceeds cap {cap}")
        if self.fast:
            psi = self.prepare(theta)
            N = psi.size
            u = np.conj(psi) * self.energies
            # g(m) = sum_z conj(psi_z) E_z psi_{z^m}, an XOR correlation
            g = fwht(fwht(u) * fwht(psi)) / N
            shifted = psi[self.index[None, :] ^ self.masks[:, None]]
            A = np.conj(shifted) @ (self.energies[:, None] * shifted.T)
            H = -2.0 * np.real(g[self.masks[:, None] ^ self.masks[None, :]] - A)
            return 0.5 * (H + H.T)
        H = np.empty((M, M))
        for k in range(M):
            e = np.zeros(M)
            e[k] = h
            H[:, k] = (self.gradient(theta + e) - self.gradient(theta - e)) / (2 * h)
        return 0.5 * (H + H.T)


# --- module-level API -----------------------------------------------------------

def prepare(ansatz: Ansatz, theta, graph: WeightedGraph | None = None) -> np.ndarray:
    return Simulator(graph, ansatz).prepare(theta)


def objective(g: WeightedGraph, psi: np.ndarray) -> float:
    psi = np.asarray(psi)
    if psi.size != 1 << g.n_vertices:
        raise StateError(f"state of size {psi.size} incompatible with {g.n_vertices} qubits")
    return float(np.dot(np.abs(psi) ** 2, energy_table(g)))


def maxcut_objective(g: WeightedGraph, psi: np.ndarray) -> float:
    return (objective(g, psi) - g.total_weight) / 2


def gradient(g: WeightedGraph, ansatz: Ansatz, theta) -> np.ndarray:
    return Simulator(g, ansatz).gradient(theta)


def hessian(g: WeightedGraph, ansatz: Ansatz, theta, cap: int = HESSIAN_CAP) -> np.ndarray:
    return Simulator(g, ansatz).hessian(theta, cap=cap)


def sample_cut(psi: np.ndarray, seed) -> int:
    p = np.abs(np.asarray(psi)) ** 2
    rng = np.random.default_rng(seed)
    return int(rng.choice(p.size, p=p / p.sum()))


def best_basis_cut(g: WeightedGraph, psi: np.ndarray, threshold: float = 1e-12) -> int:
    """Best cut among basis states carrying probability above ``threshold``."""
    p = np.abs(np.asarray(psi)) ** 2
    support = np.flatnonzero(p > threshold)
    values = [cut_value(g, int(z)) for z in support]
    return int(support[int(np.argmax(values))])


# --- binary dump ----------------------------------------------------------------

def dump_state(psi: np.ndarray) -> bytes:
    psi = np.asarray(psi, dtype=complex)
    n = psi.size.bit_length() - 1
    if psi.size != 1 << n:
        raise StateError("state length must be a power of two")
    header = STATE_MAGIC + struct.pack("<H", n) + bytes(8)
    return header + psi.astype("<c16").tobytes()


def load_state(data: bytes) -> np.ndarray:
    if len(data) < 16 or data[:6] != STATE_MAGIC:
        raise StateError("not a state dump (bad magic)")
    (n,) = struct.unpack("<H", data[6:8])
    body = data[16:]
    if len(body) != 16 << n:
        raise StateError(f"state dump body has {len(body)} bytes, expected {16 << n}")
    return np.frombuffer(body, dtype="<c16").astype(complex)
