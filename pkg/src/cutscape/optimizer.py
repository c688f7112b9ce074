"""Limited-memory BFGS with a strong-Wolfe line search, plus multi-restart
minimization of ansatz objectives.

Stopping rules follow the usual L-BFGS conventions: ``|grad|_inf < gtol``, or
``(f_k - f_{k+1}) / max(|f_k|, |f_{k+1}|, 1) <= ftol``, or the iteration cap.
"""
from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass

import numpy as np

from .ansatz import Ansatz
from .graph import WeightedGraph, cut_value, max_cut_bruteforce
from .statevec import Simulator, best_basis_cut

C1 = 1e-4
C2 = 0.9


class OptimizerError(RuntimeError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    gtol: float = 1e-6
    ftol: float = 1e-5
    max_iters: int = 1000
    memory: int = 10
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.gtol <= 0 or self.ftol <= 0:
            raise ValueError("tolerances must be positive")
        if self.memory < 1 or self.max_iters < 1 or self.restarts < 1:
            raise ValueError("memory, max_iters and restarts must be >= 1")


@dataclass
class MinimizeResult:
    theta: np.ndarray
    f: float
    grad: np.ndarray
    iterations: int
    converged_by: str  # gtol | ftol | max_iters | line_search
    evaluations: int
    history: list

    @property
    def converged(self) -> bool:
        return self.converged_by in ("gtol", "ftol")


def _checked(fg):
    def wrapped(x):
        f, g = fg(x)
        f = float(f)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise OptimizerError(f"objective returned a non-finite value at iterate {x}")
        return f, np.asarray(g, dtype=float)

    return wrapped


def _cubic_min(a, fa, da, b, fb, db):
    d1 = da + db - 3 * (fa - fb) / (a - b)
    rad = d1 * d1 - da * db
    if rad < 0:
        return None
    d2 = np.sign(b - a) * np.sqrt(rad)
    denom = db - da + 2 * d2
    if denom == 0:
        return None
    return b - (b - a) * (db + d2 - d1) / denom


def strong_wolfe(fg, x, f0, g0, d, alpha1, c1=C1, c2=C2, max_iter=40):
    """Step length satisfying the strong Wolfe conditions along ``d``.

    Returns (alpha, f, g, evaluations) or None when no acceptable step is found.
    """
    dphi0 = float(g0 @ d)
    evals = 0

    def phi(a):
        nonlocal evals
        evals += 1
        f, g = fg(x + a * d)
        return f, g, float(g @ d)

    def zoom(lo, f_lo, d_lo, g_lo, hi, f_hi, d_hi):
        for _ in range(max_iter):
            a = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            width = abs(hi - lo)
            if a is None or not (min(lo, hi) + 0.1 * width <= a <= max(lo, hi) - 0.1 * width):
                a = 0.5 * (lo + hi)
            f, g, da = phi(a)
            if f > f0 + c1 * a * dphi0 or f >= f_lo:
                hi, f_hi, d_hi = a, f, da
            else:
                if abs(da) <= -c2 * dphi0:
                    return a, f, g
                if da * (hi - lo) >= 0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo, g_lo = a, f, da, g
            if width < 1e-14 * max(1.0, abs(lo)):
                break
        # the low end always satisfies sufficient decrease; take it if it moved
        return (lo, f_lo, g_lo) if lo > 0 else None

    a_prev, f_prev, d_prev, g_prev = 0.0, f0, dphi0, g0
    a = alpha1
    for i in range(max_iter):
        f, g, da = phi(a)
        if f > f0 + c1 * a * dphi0 or (i > 0 and f >= f_prev):
            out = zoom(a_prev, f_prev, d_prev, g_prev, a, f, da)
            break
        if abs(da) <= -c2 * dphi0:
            out = (a, f, g)
            break
        if da >= 0:
            out = zoom(a, f, da, g, a_prev, f_prev, d_prev)
            break
        a_prev, f_prev, d_prev, g_prev = a, f, da, g
        a *= 2.0
    else:
        out = (a_prev, f_prev, g_prev) if a_prev > 0 else None
    return None if out is None else (*out, evals)


def minimize_fg(fg, theta0, config: OptimizerConfig = OptimizerConfig(), record: bool = False) -> MinimizeResult:
    """Minimize with a callable returning ``(f, grad)``."""
    fg = _checked(fg)
    x = np.array(theta0, dtype=float)
    f, g = fg(x)
    evals = 1
    history = [f] if record else []
    S, Y = deque(maxlen=config.memory), deque(maxlen=config.memory)
    if np.max(np.abs(g), initial=0.0) < config.gtol:
        return MinimizeResult(x, f, g, 0, "gtol", evals, history)
    it = 0
    while it < config.max_iters:
        it += 1
        # two-loop recursion
        q = g.copy()
        rho_alpha = []
        for s, y in zip(reversed(S), reversed(Y)):
            rho = 1.0 / (y @ s)
            a = rho * (s @ q)
            q -= a * y
            rho_alpha.append((rho, a))
        gamma = (S[-1] @ Y[-1]) / (Y[-1] @ Y[-1]) if S else 1.0
        d = gamma * q
        for (s, y), (rho, a) in zip(zip(S, Y), reversed(rho_alpha)):
            d += s * (a - rho * (y @ d))
        d = -d
        if g @ d >= 0:
            S.clear(), Y.clear()
            d = -g
        alpha1 = 1.0 if S else min(1.0, 1.0 / np.linalg.norm(g))
        step = strong_wolfe(fg, x, f, g, d, alpha1)
        if step is None and S:
            S.clear(), Y.clear()
            d = -g
            step = strong_wolfe(fg, x, f, g, d, min(1.0, 1.0 / np.linalg.norm(g)))
        if step is None:
            return MinimizeResult(x, f, g, it, "line_search", evals, history)
        alpha, f_new, g_new, ne = step
        evals += ne
        s, y = alpha * d, g_new - g
        if s @ y > 1e-12 * (y @ y):
            S.append(s)
            Y.append(y)
        x = x + s
        f_old, f, g = f, f_new, g_new
        if record:
            history.append(f)
        if np.max(np.abs(g)) < config.gtol:
            return MinimizeResult(x, f, g, it, "gtol", evals, history)
        if (f_old - f) / max(abs(f_old), abs(f), 1.0) <= config.ftol:
            return MinimizeResult(x, f, g, it, "ftol", evals, history)
    return MinimizeResult(x, f, g, it, "max_iters", evals, history)


def minimize(objective, gradient, theta0, config: OptimizerConfig = OptimizerConfig(), record: bool = False) -> MinimizeResult:
    return minimize_fg(lambda t: (objective(t), gradient(t)), theta0, config, record)


@dataclass
class RunRecord:
    restart: int
    theta_final: np.ndarray
    J_final: float
    iterations: int
    converged_by: str
    alpha: float
    alpha_rounded: float = float("nan")


def approximation_ratio(g: WeightedGraph, J: float, maxcut: float) -> float:
    """Continuous readout: the cut value implied by J over the exact MaxCut."""
    if maxcut <= 0:
        return 1.0
    return (g.total_weight - J) / 2 / maxcut


def restart_seeds(seed: int, restarts: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(restarts)


def optimize_ansatz(
    g: WeightedGraph, ansatz: Ansatz, config: OptimizerConfig = OptimizerConfig(), maxcut: float | None = None, evaluator=None
) -> list[RunRecord]:
    """Independent runs from theta0 ~ U[0, 2 pi)^M, one per restart."""
    if maxcut is None:
        maxcut = max_cut_bruteforce(g)[0]
    sim = Simulator(g, ansatz) if evaluator is None else evaluator
    records = []
    for r, ss in enumerate(restart_seeds(config.seed, config.restarts)):
        theta0 = np.random.default_rng(ss).uniform(0.0, 2 * np.pi, ansatz.M)
        res = minimize_fg(sim.value_and_grad, theta0, config)
        rec = RunRecord(r, res.theta, res.f, res.iterations, res.converged_by, approximation_ratio(g, res.f, maxcut))
        if isinstance(sim, Simulator) and maxcut > 0:
            rec.alpha_rounded = cut_value(g, best_basis_cut(g, sim.prepare(res.theta), 1e-6)) / maxcut
        records.append(rec)
    return records


def runs_csv(records: list[RunRecord]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["restart", "J_final", "alpha", "iters", "converged_by"])
    for r in records:
        out.writerow([r.restart, f"{r.J_final:.17g}", f"{r.alpha:.17g}", r.iterations, r.converged_by])
    return buf.getvalue()
