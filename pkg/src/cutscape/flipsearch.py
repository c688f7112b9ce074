"""Classical local search over cuts where a move flips one ansatz vertex subset.

A move is accepted only when it strictly increases the cut value. Cuts where
no move is accepted are exactly the cuts satisfying the local-minimum
condition on J, independent of how moves are proposed.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .ansatz import Ansatz
from .graph import BRUTE_FORCE_CAP, ResourceCapError, WeightedGraph, cut_table, max_cut_bruteforce

POLICIES = ("uniform_random", "first_improvement", "greedy")


@dataclass(frozen=True)
class FlipPolicy:
    kind: str = "first_improvement"
    seed: int = 0
    max_steps: int = 100_000

    def __post_init__(self):
        if self.kind not in POLICIES:
            raise ValueError(f"unknown flip policy {self.kind!r}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class FlipTrace:
    steps: list = field(default_factory=list)  # (step, flipped mask, cut value after)
    converged: bool = True

    def __len__(self):
        return len(self.steps)


def ansatz_masks(ansatz) -> list[int]:
    if isinstance(ansatz, Ansatz):
        return [g.mask for g in ansatz.generators if g.kind == "x_string"]
    return [int(m) for m in ansatz]


class _CutState:
    """Incremental cut bookkeeping: which edges each mask flips across the cut."""

    def __init__(self, g: WeightedGraph, masks: list[int]):
        self.w = g.weights
        m = np.asarray(masks, dtype=np.int64).reshape(-1, 1)
        self.cross = (((m >> g.heads) ^ (m >> g.tails)) & 1).astype(bool)
        self.heads, self.tails = g.heads, g.tails

    def indicator(self, z: int) -> np.ndarray:
        return (((z >> self.heads) ^ (z >> self.tails)) & 1).astype(bool)

    def values_after(self, ind: np.ndarray) -> np.ndarray:
        return (ind[None, :] ^ self.cross) @ self.w


def flip_search(
    g: WeightedGraph, ansatz, start: int, policy: FlipPolicy = FlipPolicy()
) -> tuple[int, FlipTrace]:
    masks = ansatz_masks(ansatz)
    trace = FlipTrace()
    z = int(start)
    if not masks:
        return z, trace
    st = _CutState(g, masks)
    ind = st.indicator(z)
    current = float(ind @ st.w)
    rng = np.random.default_rng(policy.seed)
    order = np.arange(len(masks))
    mask_arr = np.asarray(masks, dtype=np.int64)
    while True:
        after = st.values_after(ind)
        better = after > current
        if not better.any():
            break
        if len(trace) >= policy.max_steps:
            trace.converged = False
            break
        if policy.kind == "first_improvement":
            k = int(np.argmax(better))
        elif policy.kind == "greedy":
            best = after.max()
            ties = np.flatnonzero(after == best)
            k = int(ties[np.argmin(mask_arr[ties])])
        else:
            # a uniformly random proposal sequence, conditioned on acceptance
            perm = rng.permutation(order)
            k = int(perm[np.argmax(better[perm])])
        z ^= masks[k]
        ind = ind ^ st.cross[k]
        current = float(ind @ st.w)
        trace.steps.append((len(trace) + 1, masks[k], current))
    return z, trace


def fixed_point_set(g: WeightedGraph, ansatz, cap: int = BRUTE_FORCE_CAP) -> set[int]:
    """Cuts (vertex 0 on the 0 side) that admit no strictly improving flip."""
    n = g.n_vertices
    if n > cap:
        raise ResourceCapError(f"fixed-point enumeration over 2^{n - 1} cuts exceeds cap n<={cap}")
    C = cut_table(g)
    zs = np.arange(0, 1 << n, 2, dtype=np.int64)
    stuck = np.ones(zs.size, dtype=bool)
    for m in ansatz_masks(ansatz):
        stuck &= ~(C[zs ^ m] > C[zs])
    return {int(z) for z in zs[stuck]}


@dataclass
class FlipRun:
    trial: int
    start: int
    final: int
    cutval: float
    alpha: float
    steps: int
    converged: bool


def greedy_approximation_run(
    g: WeightedGraph, ansatz, trials: int, seed: int, policy: str = "greedy", max_steps: int = 100_000
) -> dict:
    """Repeated searches from uniformly random bipartitions."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    best, _ = max_cut_bruteforce(g)
    children = np.random.SeedSequence(seed).spawn(trials)
    runs = []
    for t, ss in enumerate(children):
        rng = np.random.default_rng(ss)
        start = int(rng.integers(0, 1 << g.n_vertices))
        pol = FlipPolicy(policy, int(rng.integers(0, 2**63 - 1)), max_steps)
        final, trace = flip_search(g, ansatz, start, pol)
        cv = trace.steps[-1][2] if trace.steps else float(_CutState(g, [0]).indicator(start) @ g.weights)
        runs.append(FlipRun(t, start, final, cv, cv / best if best > 0 else 1.0, len(trace), trace.converged))
    return {
        "mean_cut": float(np.mean([r.cutval for r in runs])),
        "mean_alpha": float(np.mean([r.alpha for r in runs])),
        "mean_steps": float(np.mean([r.steps for r in runs])),
        "runs": runs,
    }


def runs_csv(runs: list[FlipRun], n_vertices: int) -> str:
    width = (n_vertices + 3) // 4
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["trial", "start_hex", "final_hex", "cutval", "alpha", "steps"])
    for r in runs:
        out.writerow([r.trial, f"0x{r.start:0{width}x}", f"0x{r.final:0{width}x}", f"{r.cutval:.17g}", f"{r.alpha:.17g}", r.steps])
    return buf.getvalue()
