"""Gradient statistics of X-ansatz objectives under uniformly random parameters.

Closed form: Var(d_k J) = 4 sum_{ab cut by mask k} w_ab^2 |K_ab| / 2^|C_ab|, plus
cross terms 8 w_ab w_cd |K| / 2^|C| for each pair of edges sharing the same cut
set. Edges with different cut sets depend on different parameter subsets, so
their products average to zero; edges with equal cut sets expand into the same
trigonometric monomials with the same signs and do not.
The Monte Carlo check goes through the statevector gradient, not the kernels.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .ansatz import Ansatz
from .graph import WeightedGraph
from .statevec import Simulator, fwht
from .trigform import KERNEL_CAP, cut_sets, kernel_sets


@dataclass
class VarianceReport:
    k: int
    closed_form: float
    mc_estimate: float = float("nan")
    mc_stderr: float = float("nan")
    samples: int = 0
    per_edge: list = field(default_factory=list)  # (edge, |C|, |K|, contribution)
    cross_terms: list = field(default_factory=list)  # (edge, edge, contribution)


def variance_closed_form(g: WeightedGraph, ansatz: Ansatz, k: int, cap: int = KERNEL_CAP) -> VarianceReport:
    ansatz.require_x_ansatz()
    if not 0 <= k < ansatz.M:
        raise IndexError(f"parameter index {k} out of range")
    per_edge, cross, total = [], [], 0.0
    groups: dict[tuple, list] = {}
    for cs in cut_sets(g, ansatz):
        if k not in cs.members:
            continue
        fam = kernel_sets(cs, ansatz, cap)
        scale = 4.0 * len(fam.kernels) / 2.0 ** len(cs.members)
        contrib = scale * cs.weight**2
        per_edge.append((cs.edge, len(cs.members), len(fam.kernels), contrib))
        total += contrib
        for edge, w in groups.get(cs.members, []):
            c = 2.0 * scale * w * cs.weight
            cross.append((edge, cs.edge, c))
            total += c
        groups.setdefault(cs.members, []).append((cs.edge, cs.weight))
    return VarianceReport(k, total, per_edge=per_edge, cross_terms=cross)


def _gradient_samples(sim: Simulator, k: int, thetas: np.ndarray) -> np.ndarray:
    """d_k J for a batch of parameter vectors (rows of ``thetas``)."""
    if sim.fast:
        N = sim.index.size
        psi = fwht(np.exp(-1j * (thetas @ sim.walsh_signs))) / N
        lam = psi * sim.energies
        shifted = psi[:, sim.index ^ int(sim.masks[k])]
        return 2.0 * np.imag(np.sum(np.conj(lam) * shifted, axis=1))
    return np.array([sim.gradient(t)[k] for t in thetas])


def variance_monte_carlo(
    g: WeightedGraph, ansatz: Ansatz, k: int, samples: int, seed, batch: int = 8192
) -> tuple[float, float, float, float]:
    """(mean, variance, stderr of variance, stderr of mean) of d_k J.

    theta ~ U[0, 2 pi)^M. The variance stderr uses the fourth central moment,
    since these gradient distributions are bounded and far from Gaussian.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    sim = Simulator(g, ansatz)
    rng = np.random.default_rng(seed)
    draws = []
    for start in range(0, samples, batch):
        m = min(batch, samples - start)
        draws.append(_gradient_samples(sim, k, rng.uniform(0.0, 2 * np.pi, size=(m, ansatz.M))))
    x = np.concatenate(draws)
    n = x.size
    mean = float(x.mean())
    d = x - mean
    var = float(np.dot(d, d) / (n - 1))
    m4 = float(np.mean(d**4))
    var_of_var = (m4 - var**2 * (n - 3) / (n - 1)) / n
    return mean, var, float(np.sqrt(max(var_of_var, 0.0))), float(np.sqrt(var / n))


def variance_report(g: WeightedGraph, ansatz: Ansatz, k: int, samples: int, seed) -> VarianceReport:
    rep = variance_closed_form(g, ansatz, k)
    _, var, se, _ = variance_monte_carlo(g, ansatz, k, samples, seed)
    rep.mc_estimate, rep.mc_stderr, rep.samples = var, se, samples
    return rep


def report_csv(rep: VarianceReport) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["a", "b", "|C|", "|K|", "contribution"])
    for (a, b), nc, nk, c in rep.per_edge:
        out.writerow([a, b, nc, nk, f"{c:.17g}"])
    for e1, e2, c in rep.cross_terms:
        out.writerow([f"# cross {e1[0]}-{e1[1]}", f"{e2[0]}-{e2[1]}", "", "", f"{c:.17g}"])
    out.writerow(["# k", rep.k, "closed_form", f"{rep.closed_form:.17g}"])
    out.writerow(["# mc_variance", f"{rep.mc_estimate:.17g}", "mc_stderr", f"{rep.mc_stderr:.17g}", rep.samples])
    return buf.getvalue()
