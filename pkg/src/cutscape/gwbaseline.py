"""Goemans-Williamson style baseline.

The MaxCut SDP is solved heuristically by a low-rank (Burer-Monteiro)
factorization: unit vectors v_a in R^r, maximizing sum w (1 - v_a.v_b)/2 by
Riemannian gradient ascent with backtracking. Random hyperplanes round the
vectors to cuts and the best rounded cut is kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph, cut_value


@dataclass(frozen=True)
class GwConfig:
    rank: int | None = None  # default ceil(sqrt(2n))
    descent_iters: int = 10000
    rounding_trials: int = 100
    seed: int = 0
    tol: float = 1e-13

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise ValueError("rank must be >= 2")
        if self.rounding_trials < 1:
            raise ValueError("rounding_trials must be >= 1")


@dataclass
class GwResult:
    cut: int
    value: float
    relaxation: float
    iterations: int
    converged: bool
    history: list


def relaxation_value(g: WeightedGraph, V: np.ndarray) -> float:
    dots = np.einsum("ij,ij->i", V[g.heads], V[g.tails])
    return float(np.dot(g.weights, (1 - dots) / 2))


def _normalize(V):
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def solve_relaxation(g: WeightedGraph, config: GwConfig, rng: np.random.Generator):
    n = g.n_vertices
    r = config.rank or math.ceil(math.sqrt(2 * n))
    A = g.adjacency()
    V = _normalize(rng.standard_normal((n, r)))
    f = relaxation_value(g, V)
    history = [f]
    step = 1.0 / max(np.abs(A).sum(axis=1).max(), 1e-12)
    converged = False
    it = 0
    for it in range(1, config.descent_iters + 1):
        G = -0.5 * A @ V  # Euclidean gradient of the relaxation
        G -= np.einsum("ij,ij->i", G, V)[:, None] * V  # tangent projection
        gnorm2 = float((G * G).sum())
        if gnorm2 < config.tol**2:
            converged = True
            break
        t = step * 4
        while True:
            V_new = _normalize(V + t * G)
            f_new = relaxation_value(g, V_new)
            if f_new >= f + 1e-4 * t * gnorm2 or t < 1e-12:
                break
            t *= 0.5
        if f_new < f:
            converged = True
            break
        step = t
        gain = f_new - f
        V, f = V_new, f_new
        history.append(f)
        if gain <= config.tol * max(1.0, abs(f)):
            converged = True
            break
    return V, f, it, converged, history


def round_hyperplanes(g: WeightedGraph, V: np.ndarray, trials: int, rng: np.random.Generator) -> tuple[int, float, list]:
    """Best of ``trials`` random-hyperplane roundings; returns the running best too."""
    H = rng.standard_normal((trials, V.shape[1]))
    sides = (V @ H.T) >= 0  # (n, trials)
    weights = 1 << np.arange(g.n_vertices, dtype=object)
    best_cut, best_val, running = 0, -1.0, []
    for t in range(trials):
        z = int(np.dot(sides[:, t].astype(object), weights))
        val = cut_value(g, z)
        if val > best_val:
            best_cut, best_val = z, val
        running.append(best_val)
    return best_cut, best_val, running


def gw_maxcut(g: WeightedGraph, config: GwConfig = GwConfig()) -> GwResult:
    if g.n_vertices < 2:
        raise ValueError("GW baseline needs at least two vertices")
    rng = np.random.default_rng(config.seed)
    V, f, it, converged, history = solve_relaxation(g, config, rng)
    cut, val, _ = round_hyperplanes(g, V, config.rounding_trials, rng)
    return GwResult(cut, val, f, it, converged, history)
