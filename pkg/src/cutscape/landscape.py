"""Critical points of X-ansatz landscapes.

At a parameter configuration that prepares a basis state |z> the Hessian is
diagonal with entries 2 (E(z ^ m_j) - E(z)), where E is the Ising energy.
Whether |z> is a local optimum therefore reduces to comparing E(z) against the
energies of its flips by the ansatz masks.
"""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .ansatz import Ansatz
from .graph import BRUTE_FORCE_CAP, ResourceCapError, WeightedGraph, energy_table, ising_energy
from .statevec import Simulator

CLASSES = ("global_min", "global_max", "local_min", "local_max", "saddle")
GRAD_TOL = 1e-6
EIG_TOL = 1e-8
CASE_C_TOL = 1e-6


class NotCriticalError(ValueError):
    pass


@dataclass(frozen=True)
class CriticalPointReport:
    cut: int
    j_value: float
    hessian_diag: np.ndarray
    classification: str


@dataclass
class LandscapeSummary:
    n_vertices: int
    counts: dict
    witnesses: dict = field(default_factory=dict)
    reports: list = field(default_factory=list)
    ground_cut: int = 0

    @property
    def local_optima(self) -> int:
        return self.counts["local_min"] + self.counts["local_max"]


def hessian_diag_at_eigenstate(g: WeightedGraph, ansatz: Ansatz, z: int) -> np.ndarray:
    ansatz.require_x_ansatz()
    e0 = ising_energy(g, z)
    return np.array([2 * (ising_energy(g, int(z) ^ int(m)) - e0) for m in ansatz.masks])


def parameters_for_cut(ansatz: Ansatz, z: int) -> np.ndarray | None:
    """theta in {0, pi/2}^M preparing |z> (up to phase), or None if unreachable.

    Solves sum_j x_j m_j = z over GF(2) by elimination.
    """
    ansatz.require_x_ansatz()
    pivots: dict[int, tuple[int, int]] = {}  # leading bit -> (reduced mask, combo)
    for j, m in enumerate(ansatz.masks.tolist()):
        combo = 1 << j
        while m:
            top = m.bit_length() - 1
            if top not in pivots:
                pivots[top] = (m, combo)
                break
            pm, pc = pivots[top]
            m ^= pm
            combo ^= pc
    target, combo = int(z), 0
    while target:
        top = target.bit_length() - 1
        if top not in pivots:
            return None
        pm, pc = pivots[top]
        target ^= pm
        combo ^= pc
    return np.array([np.pi / 2 if (combo >> j) & 1 else 0.0 for j in range(ansatz.M)])


def classify_all_eigenstates(
    g: WeightedGraph, ansatz: Ansatz, cap: int = BRUTE_FORCE_CAP, keep_reports: bool = False
) -> LandscapeSummary:
    """Classify every cut (vertex 0 pinned to the 0 side) as a critical point.

    Weak inequalities: a cut with a zero Hessian entry still counts as a local
    optimum candidate.
    """
    ansatz.require_x_ansatz()
    n = g.n_vertices
    if n > cap:
        raise ResourceCapError(f"eigenstate classification over 2^{n - 1} cuts exceeds cap n<={cap}")
    E = energy_table(g)
    zs = np.arange(0, 1 << n, 2, dtype=np.int64)
    masks = ansatz.masks
    Ez = E[zs]
    e_min, e_max = E.min(), E.max()
    labels = np.empty(zs.size, dtype=object)
    cond_min = np.ones(zs.size, dtype=bool)
    cond_max = np.ones(zs.size, dtype=bool)
    for m in masks:
        Ef = E[zs ^ m]
        cond_min &= Ez <= Ef
        cond_max &= Ez >= Ef
    labels[:] = "saddle"
    labels[cond_max] = "local_max"
    labels[cond_min] = "local_min"
    labels[Ez == e_max] = "global_max"
    labels[Ez == e_min] = "global_min"
    counts = Counter({c: 0 for c in CLASSES})
    counts.update(labels.tolist())
    ground = int(zs[int(np.argmin(Ez))])
    summary = LandscapeSummary(n, dict(counts), ground_cut=ground)
    for c in ("local_min", "local_max"):
        summary.witnesses[c] = [int(z) for z in zs[labels == c]]
    if keep_reports:
        for z, ez, lab in zip(zs.tolist(), Ez.tolist(), labels.tolist()):
            diag = 2 * (E[z ^ masks] - ez)
            summary.reports.append(CriticalPointReport(z, ez, diag, lab))
    return summary


def cond_min_cuts(g: WeightedGraph, ansatz: Ansatz) -> set[int]:
    """Cuts (vertex 0 on the 0 side) with E(z) <= E(z ^ m) for every mask."""
    ansatz.require_x_ansatz()
    zs = np.arange(0, 1 << g.n_vertices, 2, dtype=np.int64)
    E = energy_table(g)
    ok = np.ones(zs.size, dtype=bool)
    for m in ansatz.masks:
        ok &= E[zs] <= E[zs ^ m]
    return {int(z) for z in zs[ok]}


def improving_flip_witness(z: int, ground: int) -> int:
    """Flip set taking cut z straight to the ground cut."""
    return int(z) ^ int(ground)


def witness_index(ansatz: Ansatz, z: int, ground: int) -> int | None:
    """Index of an ansatz element equal to z ^ ground or its complement."""
    w = improving_flip_witness(z, ground)
    full = (1 << ansatz.n_qubits) - 1
    for j, m in enumerate(ansatz.masks.tolist()):
        if m == w or m == full ^ w:
            return j
    return None


def report_csv(g: WeightedGraph, summary: LandscapeSummary, witness: bool = False) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    header = ["cut_hex", "j_value", "classification"] + (["witness_hex"] if witness else [])
    out.writerow(header)
    width = (g.n_vertices + 3) // 4
    for r in summary.reports:
        row = [f"0x{r.cut:0{width}x}", f"{r.j_value:.17g}", r.classification]
        if witness:
            row.append("" if r.classification == "global_min" else f"0x{improving_flip_witness(r.cut, summary.ground_cut):0{width}x}")
        out.writerow(row)
    c = summary.counts
    out.writerow(["# summary"] + [f"{k}={c[k]}" for k in CLASSES])
    return buf.getvalue()


# --- numeric probes ------------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    label: str
    grad_inf: float
    hess_min: float
    hess_max: float


def st_by_shifts(sim: Simulator, theta: np.ndarray, k: int) -> tuple[float, float]:
    """S_k, T_k from three evaluations along coordinate k (exact for X ansatze)."""
    vals = []
    for t in (0.0, np.pi / 4, np.pi / 2):
        th = theta.copy()
        th[k] = t
        vals.append(sim.objective(th))
    j0, jq, jh = vals
    return (j0 - jh) / 2, jq - (j0 + jh) / 2


def probe_critical_point(
    g: WeightedGraph,
    ansatz: Ansatz,
    theta,
    grad_tol: float = GRAD_TOL,
    eig_tol: float = EIG_TOL,
    case_tol: float = CASE_C_TOL,
) -> ProbeResult:
    ansatz.require_x_ansatz()
    sim = Simulator(g, ansatz)
    theta = np.asarray(theta, dtype=float)
    gmax = float(np.max(np.abs(sim.gradient(theta)), initial=0.0))
    if gmax >= grad_tol:
        raise NotCriticalError(f"|grad|_inf = {gmax:.3g} is not below {grad_tol}")
    case_c = True
    for k in range(ansatz.M):
        s, t = st_by_shifts(sim, theta, k)
        s2, c2 = np.sin(2 * theta[k]), np.cos(2 * theta[k])
        if not ((abs(s2) < case_tol and abs(t) < case_tol) or (abs(c2) < case_tol and abs(s) < case_tol)):
            case_c = False
            break
    eig = np.linalg.eigvalsh(sim.hessian(theta)) if ansatz.M else np.zeros(1)
    lo, hi = float(eig.min()), float(eig.max())
    basis = np.max(np.abs(sim.prepare(theta)) ** 2) > 1 - case_tol
    if case_c and basis:
        label = "eigenstate_config"
    elif lo < -eig_tol and hi > eig_tol:
        label = "saddle_numeric"
    elif lo > eig_tol or hi < -eig_tol:
        label = "optimum_numeric"
    else:
        label = "degenerate_flagged"
    return ProbeResult(label, gmax, lo, hi)
