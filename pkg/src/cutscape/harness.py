"""Experiment runner: paired-instance sweeps, CSV tables and SVG plots.

One top-level seed fans out to per-instance seeds through SeedSequence spawn
keys, so a result never depends on the worker count or on which other
variants share the run. Every variant sees the same instance graphs.
"""
from __future__ import annotations

import csv
import io
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from html import escape

import numpy as np

from . import ansatz as ans
from .barren import variance_closed_form, variance_monte_carlo
from .graph import BRUTE_FORCE_CAP, GraphGenerator, ResourceCapError, WeightedGraph, generate, max_cut_bruteforce
from .gwbaseline import GwConfig, gw_maxcut
from .landscape import classify_all_eigenstates
from .optimizer import OptimizerConfig, approximation_ratio, minimize_fg
from .statevec import DENSE_CAP, Simulator
from .trigform import ClosedForm

EXPERIMENTS = ("depth_sweep", "xz_sweep", "qaoa_compare", "gw_compare", "landscape_audit", "variance_audit")

DEFAULT_VARIANTS = {
    "depth_sweep": ("x",),
    "xz_sweep": ("x", "xz_kbody", "xz_global"),
    "qaoa_compare": ("qaoa_standard", "qaoa_local_x", "qaoa_local_x_zero_start", "x", "xz_kbody"),
    "gw_compare": ("classical",),
    "landscape_audit": ("full",),
    "variance_audit": ("random_x",),
}
LANDSCAPE_GRAPHS = {"full": "complete", "classical": "complete", "path": "path-chain", "ring": "cycle"}
QAOA_FAMILIES = {"qaoa_standard": "standard", "qaoa_local_x": "local_x", "qaoa_local_x_zero_start": "local_x_zero_start"}
XZ_FAMILIES = {"xz_kbody": "kbody_z", "xz_global": "global_z"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "depth_sweep"
    n: int = 8
    instance_count: int = 100
    seed: int = 0
    variants: tuple[str, ...] = ()  # empty: the experiment's default set
    depths: tuple[int, ...] = ()  # k-body depths; empty: 1..n-1 (1..3 for XZ inside qaoa_compare)
    layers: tuple[int, ...] = (1, 2, 3, 4, 5, 6)  # QAOA layer counts
    degrees: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8, 9, 10)
    graph_kind: str = "complete"
    weight_range: tuple[float, float] = (0.0, 5.0)
    restarts: int = 1
    gtol: float = 1e-6
    ftol: float = 1e-5
    max_iters: int = 1000
    rounding_trials: int = 1
    samples: int = 100_000
    threads: int = 1
    csv_path: str | None = None
    svg_path: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if self.instance_count < 1:
            raise ValueError("instance_count must be >= 1")
        if self.restarts < 1 or self.threads < 1:
            raise ValueError("restarts and threads must be >= 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        cap = BRUTE_FORCE_CAP if self.experiment in ("gw_compare", "landscape_audit") else DENSE_CAP
        if self.n > cap:
            raise ResourceCapError(f"{self.experiment} with n={self.n} exceeds the cap n<={cap}")
        unknown = set(self.variants) - _known_variants(self.experiment)
        if unknown:
            raise ValueError(f"unknown variants for {self.experiment}: {sorted(unknown)}")

    @property
    def active_variants(self) -> tuple[str, ...]:
        return self.variants or DEFAULT_VARIANTS[self.experiment]

    @property
    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(gtol=self.gtol, ftol=self.ftol, max_iters=self.max_iters)


def _known_variants(experiment: str) -> set[str]:
    if experiment == "landscape_audit":
        return set(LANDSCAPE_GRAPHS)
    if experiment in ("xz_sweep", "qaoa_compare", "depth_sweep"):
        return {"x"} | set(XZ_FAMILIES) | (set(QAOA_FAMILIES) if experiment == "qaoa_compare" else set())
    return set(DEFAULT_VARIANTS[experiment])


@dataclass
class ExperimentRecord:
    variant: str
    x: int  # k-body depth, parameter count M, vertex degree or n
    mean: float
    std: float  # population std over instances
    alphas: tuple = ()  # per-instance values in instance order
    metric: str = "alpha"

    @classmethod
    def from_values(cls, variant, x, values, metric="alpha"):
        v = np.asarray(values, dtype=float)
        return cls(variant, int(x), float(v.mean()), float(v.std()), tuple(v.tolist()), metric)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[ExperimentRecord]
    rows: list[dict]  # per-instance detail, ordered by (variant, x, instance)
    columns: tuple[str, ...]
    nonconverged: int = 0
    meta: dict = field(default_factory=dict)

    def record(self, variant: str, x: int) -> ExperimentRecord:
        for r in self.records:
            if r.variant == variant and r.x == x:
                return r
        raise KeyError((variant, x))

    def series(self, variant: str) -> list[ExperimentRecord]:
        return [r for r in self.records if r.variant == variant]


# --- seeds ------------------------------------------------------------------------

def instance_seed(seed: int, instance: int, *path: int) -> int:
    """Deterministic 32-bit seed for (instance, path) below the top-level seed."""
    ss = np.random.SeedSequence(seed, spawn_key=(instance, *path))
    return int(ss.generate_state(1)[0])


def _tag(name: str) -> int:
    return zlib.crc32(name.encode())


def instance_graphs(config: ExperimentConfig, kind: str | None = None, k: int | None = None) -> list[WeightedGraph]:
    kind = kind or config.graph_kind
    extra = () if k is None else (k,)
    return [
        generate(GraphGenerator(kind, config.n, tuple(config.weight_range), instance_seed(config.seed, i, 0, *extra), k))
        for i in range(config.instance_count)
    ]


# --- jobs ---------------------------------------------------------------------------

def _map(fn, jobs, threads: int):
    if threads <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))))


def _optimize_job(job):
    g, spec, maxcut, opt, seed, restarts = job
    sim = Simulator(g, ans.from_spec(spec))
    best = None
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        res = minimize_fg(sim.value_and_grad, rng.uniform(0.0, 2 * np.pi, sim.ansatz.M), opt)
        if best is None or res.f < best.f:
            best = res
    return {
        "alpha": approximation_ratio(g, best.f, maxcut),
        "J_final": best.f,
        "iters": best.iterations,
        "converged_by": best.converged_by,
    }


def _maxcut_job(g):
    return max_cut_bruteforce(g)[0]


def _spec_for(variant: str, n: int, x: int) -> str:
    """Ansatz spec string for a variant at grid point x (depth or layer count)."""
    if variant == "x":
        return f"xdepth:{n}:{x}"
    if variant in XZ_FAMILIES:
        return f"xz:{n}:{x}:{XZ_FAMILIES[variant]}"
    return f"qaoa:{n}:{x}:{QAOA_FAMILIES[variant]}"


def _sweep(config: ExperimentConfig, grid: dict[str, list[int]], x_of) -> ExperimentResult:
    """Optimize every (variant, grid point, instance); x_of maps grid point to plot x."""
    graphs = instance_graphs(config)
    maxcuts = _map(_maxcut_job, graphs, config.threads)
    keys, jobs = [], []
    for variant, points in grid.items():
        for p in points:
            spec = _spec_for(variant, config.n, p)
            for i, g in enumerate(graphs):
                seed = instance_seed(config.seed, i, 1, _tag(variant), p)
                keys.append((variant, x_of(variant, p), i))
                jobs.append((g, spec, maxcuts[i], config.optimizer, seed, config.restarts))
    outs = _map(_optimize_job, jobs, config.threads)
    rows = [{"variant": v, "x": x, "instance": i, **o} for (v, x, i), o in zip(keys, outs)]
    records = _records(rows, "alpha")
    bad = sum(r["converged_by"] == "max_iters" for r in rows)
    return ExperimentResult(config, records, rows, ("alpha", "J_final", "iters", "converged_by"), bad)


def _records(rows: list[dict], metric: str) -> list[ExperimentRecord]:
    groups: dict[tuple, list] = {}
    for r in rows:
        groups.setdefault((r["variant"], r["x"]), []).append(r[metric])
    return [ExperimentRecord.from_values(v, x, vals, metric) for (v, x), vals in groups.items()]


def _depths(config: ExperimentConfig) -> list[int]:
    return list(config.depths) or list(range(1, config.n))


# --- experiments --------------------------------------------------------------------

def run_depth_sweep(config: ExperimentConfig) -> ExperimentResult:
    """Mean and std of alpha against k-body depth; x = D."""
    return _sweep(config, {v: _depths(config) for v in config.active_variants}, lambda v, d: d)


def run_xz_sweep(config: ExperimentConfig) -> ExperimentResult:
    """Pure X against both XZ variants on the same instances; x = D."""
    return _sweep(config, {v: _depths(config) for v in config.active_variants}, lambda v, d: d)


def parameter_count(variant: str, n: int, p: int) -> int:
    return ans.from_spec(_spec_for(variant, n, p)).M


def run_qaoa_compare(config: ExperimentConfig) -> ExperimentResult:
    """QAOA families against X and XZ ansatze; x = parameter count M."""
    grid = {}
    for v in config.active_variants:
        if v in QAOA_FAMILIES:
            grid[v] = list(config.layers)
        elif v == "x":
            grid[v] = _depths(config)
        else:
            grid[v] = list(config.depths) or [1, 2, 3]
    return _sweep(config, grid, lambda v, p: parameter_count(v, config.n, p))


def _gw_job(job):
    g, opt, grad_seed, gw_cfg = job
    maxcut = max_cut_bruteforce(g)[0]
    cf = ClosedForm(g, ans.classical_ansatz(g.n_vertices))
    theta0 = np.random.default_rng(grad_seed).uniform(0.0, 2 * np.pi, g.n_vertices)
    res = minimize_fg(cf.value_and_grad, theta0, opt)
    gw = gw_maxcut(g, gw_cfg)
    a_grad = approximation_ratio(g, res.f, maxcut)
    a_gw = gw.value / maxcut if maxcut > 0 else 1.0
    return {
        "ratio": a_grad / a_gw,
        "alpha_grad": a_grad,
        "alpha_gw": a_gw,
        "maxcut": maxcut,
        "converged_by": res.converged_by,
        "gw_converged": gw.converged,
    }


def compare_grad_vs_gw(config: ExperimentConfig) -> ExperimentResult:
    """alpha_grad / alpha_GW on random k-regular graphs; x = degree.

    alpha_grad comes from the single-qubit ansatz and L-BFGS, alpha_GW from the
    low-rank relaxation with ``rounding_trials`` hyperplanes.
    """
    keys, jobs = [], []
    for k in config.degrees:
        graphs = instance_graphs(config, "k-regular", k)
        for i, g in enumerate(graphs):
            gw_cfg = GwConfig(rounding_trials=config.rounding_trials, seed=instance_seed(config.seed, i, 2, k))
            keys.append((k, i))
            jobs.append((g, config.optimizer, instance_seed(config.seed, i, 1, k), gw_cfg))
    outs = _map(_gw_job, jobs, config.threads)
    rows = [{"variant": "classical", "x": k, "instance": i, **o} for (k, i), o in zip(keys, outs)]
    bad = sum(r["converged_by"] == "max_iters" or not r["gw_converged"] for r in rows)
    cols = ("ratio", "alpha_grad", "alpha_gw", "maxcut", "converged_by", "gw_converged")
    return ExperimentResult(config, _records(rows, "ratio"), rows, cols, bad)


def _landscape_ansatz(variant: str, n: int) -> ans.Ansatz:
    return {
        "full": ans.x_ansatz_full_nonsymmetric,
        "classical": ans.classical_ansatz,
        "path": ans.path_ansatz,
        "ring": ans.ring_ansatz,
    }[variant](n)


def _landscape_job(job):
    g, variant = job
    s = classify_all_eigenstates(g, _landscape_ansatz(variant, g.n_vertices))
    return {"local_optima": s.local_optima, **{c: s.counts[c] for c in ("local_min", "local_max", "saddle")}}


def landscape_audit(config: ExperimentConfig) -> ExperimentResult:
    """Local-optimum counts over exhaustive eigenstate classification; x = n."""
    rows = []
    for v in config.active_variants:
        graphs = instance_graphs(config, LANDSCAPE_GRAPHS[v])
        outs = _map(_landscape_job, [(g, v) for g in graphs], config.threads)
        rows += [{"variant": v, "x": config.n, "instance": i, **o} for i, o in enumerate(outs)]
    cols = ("local_optima", "local_min", "local_max", "saddle")
    return ExperimentResult(config, _records(rows, "local_optima"), rows, cols)


def _variance_job(job):
    g, seed, samples = job
    rng = np.random.default_rng(seed)
    n = g.n_vertices
    a = ans.random_x_ansatz(n, int(rng.integers(1, 2 * n + 1)), int(rng.integers(1, n + 1)), rng)
    k = int(rng.integers(a.M))
    cf = variance_closed_form(g, a, k).closed_form
    mean, var, se_var, se_mean = variance_monte_carlo(g, a, k, samples, rng.integers(2**63))
    return {
        "z_var": (var - cf) / se_var if se_var > 0 else 0.0,
        "z_mean": mean / se_mean if se_mean > 0 else 0.0,
        "M": a.M,
        "k": k,
        "closed_form": cf,
        "mc_variance": var,
        "mc_stderr": se_var,
    }


def variance_audit(config: ExperimentConfig) -> ExperimentResult:
    """Monte Carlo gradient variance against the closed form on random X ansatze.

    The recorded metric is the z-score (MC - closed form) / stderr.
    """
    graphs = instance_graphs(config)
    jobs = [(g, instance_seed(config.seed, i, 3), config.samples) for i, g in enumerate(graphs)]
    outs = _map(_variance_job, jobs, config.threads)
    rows = [{"variant": "random_x", "x": config.n, "instance": i, **o} for i, o in enumerate(outs)]
    cols = ("z_var", "z_mean", "M", "k", "closed_form", "mc_variance", "mc_stderr")
    return ExperimentResult(config, _records(rows, "z_var"), rows, cols)


RUNNERS = {
    "depth_sweep": run_depth_sweep,
    "xz_sweep": run_xz_sweep,
    "qaoa_compare": run_qaoa_compare,
    "gw_compare": compare_grad_vs_gw,
    "landscape_audit": landscape_audit,
    "variance_audit": variance_audit,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[config.experiment](config)


# --- output -------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def result_csv(result: ExperimentResult) -> str:
    """Per-instance rows, then one summary row per (variant, x)."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["variant", "x", "instance", *result.columns])
    for r in result.rows:
        out.writerow([r["variant"], r["x"], r["instance"], *(_fmt(r[c]) for c in result.columns)])
    for rec in result.records:
        out.writerow(["# summary", rec.variant, rec.x, rec.metric, _fmt(rec.mean), _fmt(rec.std), len(rec.alphas)])
    return buf.getvalue()


PLOT_W, PLOT_H, MARGIN = 640, 400, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def emit_plot(
    records: list[ExperimentRecord],
    style: str = "band",
    path=None,
    title: str = "",
    xlabel: str = "x",
    ylabel: str = "mean",
) -> str:
    """Static SVG line plot, one series per variant, with a shaded +-1 std band.

    The root element carries the data-to-pixel map (``data-x0``, ``data-xscale``,
    ``data-y0``, ``data-yscale``) so the geometry can be checked from the file.
    """
    if not records:
        raise ValueError("no records to plot")
    if style not in ("band", "line"):
        raise ValueError(f"unknown plot style {style!r}")
    xs = [r.x for r in records]
    lo = min(r.mean - r.std for r in records)
    hi = max(r.mean + r.std for r in records)
    x_min, x_max = min(xs), max(xs)
    if x_max == x_min:
        x_min, x_max = x_min - 0.5, x_max + 0.5
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    inner_w, inner_h = PLOT_W - 2 * MARGIN, PLOT_H - 2 * MARGIN
    xscale = inner_w / (x_max - x_min)
    yscale = inner_h / (hi - lo)

    def px(x):
        return MARGIN + (x - x_min) * xscale

    def py(y):
        return PLOT_H - MARGIN - (y - lo) * yscale

    def pts(seq):
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in seq)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_W}" height="{PLOT_H}" '
        f'viewBox="0 0 {PLOT_W} {PLOT_H}" data-x0="{x_min!r}" data-xscale="{xscale!r}" '
        f'data-y0="{lo!r}" data-yscale="{yscale!r}" data-origin-x="{MARGIN}" data-origin-y="{PLOT_H - MARGIN}">',
        f'<rect x="0" y="0" width="{PLOT_W}" height="{PLOT_H}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{PLOT_H - MARGIN}" x2="{PLOT_W - MARGIN}" y2="{PLOT_H - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{PLOT_H - MARGIN}" stroke="black"/>',
    ]
    for x in sorted(set(xs)):
        parts.append(f'<text x="{px(x):.3f}" y="{PLOT_H - MARGIN + 18}" font-size="11" text-anchor="middle">{x}</text>')
    for t in np.linspace(lo + pad, hi - pad, 5):
        parts.append(f'<text x="{MARGIN - 6}" y="{py(t) + 4:.3f}" font-size="11" text-anchor="end">{t:.3g}</text>')
    parts.append(f'<text x="{PLOT_W / 2}" y="{PLOT_H - 15}" font-size="13" text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(
        f'<text x="15" y="{PLOT_H / 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 15 {PLOT_H / 2})">{escape(ylabel)}</text>'
    )
    if title:
        parts.append(f'<text x="{PLOT_W / 2}" y="25" font-size="14" text-anchor="middle">{escape(title)}</text>')
    variants = list(dict.fromkeys(r.variant for r in records))
    for c, v in enumerate(variants):
        color = PALETTE[c % len(PALETTE)]
        series = sorted((r for r in records if r.variant == v), key=lambda r: r.x)
        if style == "band":
            upper = [(px(r.x), py(r.mean + r.std)) for r in series]
            lower = [(px(r.x), py(r.mean - r.std)) for r in reversed(series)]
            parts.append(
                f'<polygon class="band" data-variant="{escape(v)}" points="{pts(upper + lower)}" '
                f'fill="{color}" fill-opacity="0.2" stroke="none"/>'
            )
        parts.append(
            f'<polyline class="mean" data-variant="{escape(v)}" points="{pts((px(r.x), py(r.mean)) for r in series)}" '
            f'fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for r in series:
            parts.append(
                f'<circle cx="{px(r.x):.3f}" cy="{py(r.mean):.3f}" r="3" fill="{color}" '
                f'data-x="{r.x}" data-mean="{r.mean!r}" data-std="{r.std!r}"/>'
            )
        parts.append(
            f'<text x="{PLOT_W - MARGIN + 4}" y="{MARGIN + 16 * c}" font-size="11" fill="{color}">{escape(v)}</text>'
        )
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg


AXIS_LABELS = {
    "depth_sweep": "k-body depth D",
    "xz_sweep": "k-body depth D",
    "qaoa_compare": "parameter count M",
    "gw_compare": "vertex degree",
    "landscape_audit": "n",
    "variance_audit": "n",
}


def write_outputs(result: ExperimentResult, csv_path=None, svg_path=None) -> str:
    text = result_csv(result)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if svg_path:
        metric = result.records[0].metric if result.records else "value"
        emit_plot(result.records, path=svg_path, xlabel=AXIS_LABELS[result.config.experiment], ylabel=f"mean {metric}")
    return text


def with_overrides(config: ExperimentConfig, **kw) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    return replace(config, **{k: v for k, v in kw.items() if k in known and v is not None})
