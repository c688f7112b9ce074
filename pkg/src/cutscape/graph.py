"""Weighted graphs, cut arithmetic, Ising energies and the exact MaxCut oracle.

Cuts are integer bitmasks: bit ``a`` set means vertex ``a`` is on the "1" side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

MAX_VERTICES = 64
BRUTE_FORCE_CAP = 24


class GraphError(ValueError):
    """Malformed graph or cut input."""


class ResourceCapError(RuntimeError):
    """Refusal to run an exponential-cost computation above its cap."""


@dataclass(frozen=True)
class WeightedGraph:
    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]
    _arrays: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n_vertices
        if not 1 <= n <= MAX_VERTICES:
            raise GraphError(f"n_vertices must be in [1, {MAX_VERTICES}], got {n}")
        seen = set()
        clean = []
        for a, b, w in self.edges:
            a, b, w = int(a), int(b), float(w)
            if a == b:
                raise GraphError(f"self-loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f"edge ({a}, {b}) out of range for n={n}")
            if not np.isfinite(w) or w < 0:
                raise GraphError(f"edge ({a}, {b}) has invalid weight {w}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            clean.append((a, b, w))
        object.__setattr__(self, "edges", tuple(clean))
        a = np.array([e[0] for e in clean], dtype=np.int64)
        b = np.array([e[1] for e in clean], dtype=np.int64)
        w = np.array([e[2] for e in clean], dtype=float)
        object.__setattr__(self, "_arrays", (a, b, w))

    @property
    def heads(self) -> np.ndarray:
        return self._arrays[0]

    @property
    def tails(self) -> np.ndarray:
        return self._arrays[1]

    @property
    def weights(self) -> np.ndarray:
        return self._arrays[2]

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    @property
    def full_mask(self) -> int:
        return (1 << self.n_vertices) - 1

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=int)
        np.add.at(deg, self.heads, 1)
        np.add.at(deg, self.tails, 1)
        return deg

    def adjacency(self) -> np.ndarray:
        """Dense symmetric weight matrix."""
        A = np.zeros((self.n_vertices, self.n_vertices))
        A[self.heads, self.tails] = self.weights
        A[self.tails, self.heads] = self.weights
        return A


def _check_cut(g: WeightedGraph, s: int) -> int:
    s = int(s)
    if s < 0 or s >> g.n_vertices:
        raise GraphError(f"cut {s:#x} does not fit in {g.n_vertices} bits")
    return s


def complement(g: WeightedGraph, s: int) -> int:
    return g.full_mask ^ _check_cut(g, s)


def cut_value(g: WeightedGraph, s: int) -> float:
    s = _check_cut(g, s)
    total = 0.0
    for a, b, w in g.edges:
        if ((s >> a) ^ (s >> b)) & 1:
            total += w
    return total


def ising_energy(g: WeightedGraph, z: int) -> float:
    """<z| sum_ab w Z_a Z_b |z>."""
    z = _check_cut(g, z)
    total = 0.0
    for a, b, w in g.edges:
        total += -w if ((z >> a) ^ (z >> b)) & 1 else w
    return total


def basis_indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def energy_table(g: WeightedGraph, n_qubits: int | None = None) -> np.ndarray:
    """Diagonal of H_p: ising energy for every basis state (qubit a = bit a)."""
    n = g.n_vertices if n_qubits is None else n_qubits
    if n > BRUTE_FORCE_CAP:
        raise ResourceCapError(f"energy table over 2^{n} states exceeds cap 2^{BRUTE_FORCE_CAP}")
    z = basis_indices(n)
    E = np.zeros(1 << n)
    for a, b, w in g.edges:
        E += np.where(((z >> a) ^ (z >> b)) & 1, -w, w)
    return E


def cut_table(g: WeightedGraph) -> np.ndarray:
    """Cut value for every assignment."""
    z = basis_indices(g.n_vertices)
    C = np.zeros(1 << g.n_vertices)
    for a, b, w in g.edges:
        C += np.where(((z >> a) ^ (z >> b)) & 1, w, 0.0)
    return C


def max_cut_bruteforce(g: WeightedGraph, cap: int = BRUTE_FORCE_CAP) -> tuple[float, int]:
    """Exact MaxCut by enumeration with vertex 0 pinned to the 0 side.

    Ties go to the numerically smallest bitstring.
    """
    n = g.n_vertices
    if n > cap:
        raise ResourceCapError(
            f"brute-force MaxCut on n={n} vertices needs 2^{n - 1} evaluations; cap is n<={cap}"
        )
    if n == 1:
        return 0.0, 0
    # z with bit 0 clear are exactly the even indices
    z = np.arange(0, 1 << n, 2, dtype=np.int64)
    C = np.zeros(z.size)
    for a, b, w in g.edges:
        C += np.where(((z >> a) ^ (z >> b)) & 1, w, 0.0)
    i = int(np.argmax(C))
    return float(C[i]), int(z[i])


# --- generators -----------------------------------------------------------

GRAPH_KINDS = ("complete", "k-regular", "path-chain", "cycle")


@dataclass(frozen=True)
class GraphGenerator:
    kind: str
    n: int
    weight_range: tuple[float, float] = (0.0, 5.0)
    seed: int = 0
    k: int | None = None

    def __post_init__(self):
        if self.kind not in GRAPH_KINDS:
            raise GraphError(f"unknown graph kind {self.kind!r}; expected one of {GRAPH_KINDS}")
        lo, hi = self.weight_range
        if not lo <= hi or lo < 0:
            raise GraphError(f"bad weight range {self.weight_range}")


def _regular_pairs(n: int, k: int, rng: np.random.Generator):
    # networkx samples near-uniformly (Steger-Wormald) where plain rejection
    # from the pairing model becomes hopeless at moderate degree
    h = nx.random_regular_graph(k, n, seed=int(rng.integers(2**31)))
    return sorted((min(a, b), max(a, b)) for a, b in h.edges())


def generate(gen: GraphGenerator) -> WeightedGraph:
    n = gen.n
    rng = np.random.default_rng(gen.seed)
    if gen.kind == "complete":
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    elif gen.kind == "path-chain":
        pairs = [(j, j + 1) for j in range(n - 1)]
    elif gen.kind == "cycle":
        if n < 3:
            raise GraphError("cycle needs n >= 3")
        pairs = [(j, j + 1) for j in range(n - 1)] + [(0, n - 1)]
    else:
        k = gen.k
        if k is None or not 0 < k < n or (k * n) % 2:
            raise GraphError(f"infeasible regular graph: n={n}, k={k} (need 0<k<n, k*n even)")
        pairs = _regular_pairs(n, k, rng)
    lo, hi = gen.weight_range
    w = rng.uniform(lo, hi, size=len(pairs))
    return WeightedGraph(n, tuple((a, b, float(x)) for (a, b), x in zip(pairs, w)))


def unweighted(g: WeightedGraph) -> WeightedGraph:
    return WeightedGraph(g.n_vertices, tuple((a, b, 1.0) for a, b, _ in g.edges))


# --- file format ------------------------------------------------------------

def format_graph(g: WeightedGraph) -> str:
    lines = [f"{g.n_vertices} {len(g.edges)}"]
    lines += [f"{a} {b} {w:.17g}" for a, b, w in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> WeightedGraph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise GraphError("graph header must be 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        if len(rows) - 1 != m:
            raise GraphError(f"header declares {m} edges, found {len(rows) - 1}")
        edges = []
        for r in rows[1:]:
            if len(r) != 3:
                raise GraphError(f"edge line needs 'a b w', got {' '.join(r)!r}")
            edges.append((int(r[0]), int(r[1]), float(r[2])))
    except ValueError as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"unparseable graph file: {exc}") from exc
    return WeightedGraph(n, tuple(edges))


def read_graph(path) -> WeightedGraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(format_graph(g))
