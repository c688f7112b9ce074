"""Closed-form objective of commuting X-string ansatze.

For an edge (a, b) only generators whose mask holds exactly one of a, b fail
to commute with Z_a Z_b. Call them the edge's cut set C. The objective is

    J = sum_ab w_ab sum_{K in kernels(C)} (-1)^{|K|/2} prod_{C-K} cos 2t prod_K sin 2t

where a kernel is a subset of C whose masks XOR to zero. Enumerating kernels
is a minimum-distance style problem, hence the hard cap on |C|.
"""
from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .ansatz import Ansatz
from .graph import ResourceCapError, WeightedGraph

KERNEL_CAP = 20
PLAIN_SCAN_MAX = 12


class KernelCapError(ResourceCapError):
    pass


@dataclass(frozen=True)
class EdgeCutSet:
    edge: tuple[int, int]
    weight: float
    members: tuple[int, ...]


@dataclass(frozen=True)
class KernelFamily:
    edge: tuple[int, int]
    kernels: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class STCoefficients:
    k: int
    s_k: float
    t_k: float


def cut_sets(g: WeightedGraph, ansatz: Ansatz) -> list[EdgeCutSet]:
    ansatz.require_x_ansatz()
    masks = ansatz.masks
    out = []
    for a, b, w in g.edges:
        hit = ((masks >> a) & 1) ^ ((masks >> b) & 1)
        out.append(EdgeCutSet((a, b), w, tuple(int(j) for j in np.flatnonzero(hit))))
    return out


def _subset_xors(masks: np.ndarray) -> np.ndarray:
    """XOR of masks[i] over every subset, indexed by subset bitmask."""
    xs = np.zeros(1 << len(masks), dtype=np.int64)
    for i, m in enumerate(masks):
        xs[1 << i : 1 << (i + 1)] = xs[: 1 << i] ^ m
    return xs


def _bits(s: int) -> list[int]:
    out, i = [], 0
    while s:
        if s & 1:
            out.append(i)
        s >>= 1
        i += 1
    return out


def null_subsets(masks, cap: int = KERNEL_CAP) -> list[tuple[int, ...]]:
    """Every subset of positions whose masks XOR to zero (the empty set included)."""
    masks = np.asarray(masks, dtype=np.int64)
    c = len(masks)
    if c > cap:
        raise KernelCapError(
            f"kernel enumeration over |C|={c} needs 2^{c} subsets; cap is {cap} "
            "(finding XOR-null subfamilies is NP-hard in general)"
        )
    if c <= PLAIN_SCAN_MAX:
        hits = np.flatnonzero(_subset_xors(masks) == 0)
        found = [tuple(_bits(int(s))) for s in hits]
    else:
        half = c // 2
        left, right = _subset_xors(masks[:half]), _subset_xors(masks[half:])
        by_value = defaultdict(list)
        for s, v in enumerate(right.tolist()):
            by_value[v].append(s)
        found = []
        for sl, v in enumerate(left.tolist()):
            for sr in by_value.get(v, ()):
                found.append(tuple(_bits(sl) + [half + i for i in _bits(sr)]))
    return sorted(found, key=lambda k: (len(k), k))


def kernel_sets(cut_set: EdgeCutSet, ansatz: Ansatz, cap: int = KERNEL_CAP) -> KernelFamily:
    masks = ansatz.masks[list(cut_set.members)] if cut_set.members else np.zeros(0, dtype=np.int64)
    local = null_subsets(masks, cap)
    members = cut_set.members
    kernels = tuple(tuple(members[i] for i in K) for K in local)
    return KernelFamily(cut_set.edge, tuple(sorted(kernels, key=lambda k: (len(k), k))))


class ClosedForm:
    """Term table for J with one row per (edge, kernel) pair.

    Row t contributes coef[t] times a product over its cut set of cos 2theta_j
    (j outside the kernel) or sin 2theta_j (j inside).
    """

    def __init__(self, g: WeightedGraph, ansatz: Ansatz, cap: int = KERNEL_CAP):
        self.graph, self.ansatz = g, ansatz
        self.cut_sets = cut_sets(g, ansatz)
        self.families = [kernel_sets(cs, ansatz, cap) for cs in self.cut_sets]
        M = ansatz.M
        rows, coefs, edge_of = [], [], []
        for e, (cs, fam) in enumerate(zip(self.cut_sets, self.families)):
            for K in fam.kernels:
                rows.append((cs.members, set(K)))
                coefs.append(cs.weight * (-1.0) ** (len(K) // 2))
                edge_of.append(e)
        width = max((len(c) for c, _ in rows), default=0)
        self.idx = np.full((len(rows), max(width, 1)), M, dtype=np.int64)  # M = padding slot
        self.is_sin = np.zeros(self.idx.shape, dtype=bool)
        for t, (members, K) in enumerate(rows):
            for p, j in enumerate(members):
                self.idx[t, p] = j
                self.is_sin[t, p] = j in K
        self.coef = np.array(coefs, dtype=float)
        self.edge_of = np.array(edge_of, dtype=np.int64)

    def _factors(self, theta, drop: int | None = None):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.ansatz.M,):
            raise ValueError(f"expected {self.ansatz.M} parameters, got shape {theta.shape}")
        c = np.append(np.cos(2 * theta), 1.0)
        s = np.append(np.sin(2 * theta), 1.0)
        if drop is not None:
            c[drop] = s[drop] = 1.0
        return np.where(self.is_sin, s[self.idx], c[self.idx]), c, s

    def objective(self, theta) -> float:
        F, _, _ = self._factors(theta)
        return float(np.dot(self.coef, F.prod(axis=1)))

    def value_and_grad(self, theta) -> tuple[float, np.ndarray]:
        F, c, s = self._factors(theta)
        dF = np.where(self.is_sin, 2 * c[self.idx], -2 * s[self.idx])
        T, L = F.shape
        ones = np.ones((T, 1))
        before = np.cumprod(np.hstack([ones, F[:, :-1]]), axis=1)
        after = np.cumprod(np.hstack([ones, F[:, :0:-1]]), axis=1)[:, ::-1]
        contrib = self.coef[:, None] * dF * before * after
        grad = np.zeros(self.ansatz.M + 1)
        np.add.at(grad, self.idx, contrib)
        return float(np.dot(self.coef, F.prod(axis=1))), grad[:-1]

    def gradient(self, theta) -> np.ndarray:
        return self.value_and_grad(theta)[1]

    def st(self, theta, k: int) -> tuple[float, float, float]:
        """(S_k, T_k, V_k) with J = cos(2t_k) S_k + sin(2t_k) T_k + V_k."""
        if not 0 <= k < self.ansatz.M:
            raise IndexError(f"parameter index {k} out of range")
        F, _, _ = self._factors(theta, drop=k)
        prods = self.coef * F.prod(axis=1)
        at_k = self.idx == k
        in_cos = (at_k & ~self.is_sin).any(axis=1)
        in_sin = (at_k & self.is_sin).any(axis=1)
        return (
            float(prods[in_cos].sum()),
            float(prods[in_sin].sum()),
            float(prods[~(in_cos | in_sin)].sum()),
        )

    def diagnostics(self) -> list[tuple[int, int, float, int, int]]:
        return [
            (cs.edge[0], cs.edge[1], cs.weight, len(cs.members), len(fam.kernels))
            for cs, fam in zip(self.cut_sets, self.families)
        ]


def objective_closed_form(g: WeightedGraph, ansatz: Ansatz, theta, cap: int = KERNEL_CAP) -> float:
    return ClosedForm(g, ansatz, cap).objective(theta)


def st_coefficients(g: WeightedGraph, ansatz: Ansatz, theta, k: int) -> STCoefficients:
    s, t, _ = ClosedForm(g, ansatz).st(theta, k)
    return STCoefficients(k, s, t)


def critical_condition_residual(g: WeightedGraph, ansatz: Ansatz, theta) -> np.ndarray:
    """sin(2t_k) S_k - cos(2t_k) T_k per parameter; zero exactly at critical points."""
    cf = ClosedForm(g, ansatz)
    theta = np.asarray(theta, dtype=float)
    out = np.empty(ansatz.M)
    for k in range(ansatz.M):
        s, t, _ = cf.st(theta, k)
        out[k] = np.sin(2 * theta[k]) * s - np.cos(2 * theta[k]) * t
    return out


def diagnostics_csv(g: WeightedGraph, ansatz: Ansatz, cap: int = KERNEL_CAP) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b", "w", "|C|", "|K|"])
    for a, b, wt, nc, nk in ClosedForm(g, ansatz, cap).diagnostics():
        w.writerow([a, b, f"{wt:.17g}", nc, nk])
    return buf.getvalue()
