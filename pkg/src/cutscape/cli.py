"""Command line entry point.

Exit codes: 0 success, 2 input error, 3 resource-cap refusal, 4 non-convergence
(results are still written).
"""
from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import fields
from pathlib import Path

from . import ansatz as ans
from . import barren, flipsearch, graph, harness, landscape, optimizer
from .gwbaseline import GwConfig, gw_maxcut

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_NONCONVERGED = 0, 2, 3, 4
QUICK_INSTANCES = 25


class InputError(ValueError):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    """'2,3,8' or '2-5' or a mix such as '1,3-5'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part or part == "...":
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def load_config_file(path) -> dict:
    """``key = value`` lines (an optional [experiment] header is allowed)."""
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[experiment]\n" + text
    cp = configparser.ConfigParser()
    cp.read_string(text)
    if not cp.sections():
        return {}
    raw = dict(cp[cp.sections()[0]])
    types = {f.name: f.type for f in fields(harness.ExperimentConfig)}
    out = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key not in types:
            raise InputError(f"unknown config key {key!r}")
        t = str(types[key])
        if "tuple[int" in t:
            out[key] = _int_list(value)
        elif "tuple[float" in t:
            out[key] = tuple(float(v) for v in _str_list(value))
        elif "tuple[str" in t:
            out[key] = _str_list(value)
        elif t.startswith("int"):
            out[key] = int(value)
        elif t.startswith("float"):
            out[key] = float(value)
        else:
            out[key] = value
    return out


def _load_ansatz(arg: str, n: int | None = None) -> ans.Ansatz:
    p = Path(arg)
    if p.is_file():
        return ans.loads(p.read_text())
    if ":" not in arg and n is not None:
        arg = f"{arg}:{n}"
    return ans.from_spec(arg)


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- experiment verbs ---------------------------------------------------------------

def _experiment(args, experiment: str, **fixed) -> int:
    base = load_config_file(args.config) if args.config else {}
    base.setdefault("experiment", experiment)
    if base["experiment"] != experiment:
        raise InputError(f"config file is for {base['experiment']!r}, not {experiment!r}")
    cfg = harness.ExperimentConfig(**base)
    overrides = {
        "seed": args.seed,
        "threads": args.threads,
        "csv_path": args.csv,
        "svg_path": args.svg,
        "n": getattr(args, "n", None),
        "instance_count": getattr(args, "instances", None),
        "depths": getattr(args, "depths", None),
        "layers": getattr(args, "layers", None),
        "degrees": getattr(args, "degrees", None),
        "variants": getattr(args, "variants", None),
        "restarts": getattr(args, "restarts", None),
        "max_iters": getattr(args, "max_iters", None),
        "rounding_trials": getattr(args, "rounding_trials", None),
        "samples": getattr(args, "samples", None),
        **fixed,
    }
    if getattr(args, "quick", False):
        overrides["instance_count"] = QUICK_INSTANCES
    cfg = harness.with_overrides(cfg, **overrides)
    result = harness.run_experiment(cfg)
    text = harness.write_outputs(result, None, cfg.svg_path)
    _emit(text, cfg.csv_path)
    return EXIT_NONCONVERGED if result.nonconverged else EXIT_OK


def cmd_sweep_depth(args):
    return _experiment(args, "depth_sweep")


def cmd_sweep_xz(args):
    return _experiment(args, "xz_sweep")


def cmd_compare_qaoa(args):
    return _experiment(args, "qaoa_compare")


def cmd_compare_gw(args):
    if args.kind not in ("kregular", "k-regular"):
        raise InputError("compare-gw supports k-regular graphs only")
    if args.n is None and args.config is None:
        args.n = 20
    return _experiment(args, "gw_compare")


def cmd_landscape_audit(args):
    if args.graph is None:
        return _experiment(args, "landscape_audit")
    g = graph.read_graph(args.graph)
    a = _load_ansatz(args.ansatz or "full", g.n_vertices)
    summary = landscape.classify_all_eigenstates(g, a, keep_reports=True)
    _emit(landscape.report_csv(g, summary, witness=args.witness), args.csv)
    return EXIT_OK


def cmd_variance(args):
    if args.graph is None:
        return _experiment(args, "variance_audit")
    g = graph.read_graph(args.graph)
    a = _load_ansatz(args.ansatz or "classical", g.n_vertices)
    rep = barren.variance_report(g, a, args.k, args.samples or 100_000, args.seed or 0)
    _emit(barren.report_csv(rep), args.csv)
    return EXIT_OK


def cmd_flip(args):
    g = graph.read_graph(args.graph)
    a = _load_ansatz(args.ansatz, g.n_vertices)
    out = flipsearch.greedy_approximation_run(g, a, args.trials, args.seed or 0, args.policy)
    _emit(flipsearch.runs_csv(out["runs"], g.n_vertices), args.csv)
    return EXIT_OK if all(r.converged for r in out["runs"]) else EXIT_NONCONVERGED


def cmd_optimize(args):
    g = graph.read_graph(args.graph)
    a = _load_ansatz(args.ansatz_spec, g.n_vertices)
    cfg = optimizer.OptimizerConfig(restarts=args.restarts or 1, seed=args.seed or 0, max_iters=args.max_iters or 1000)
    records = optimizer.optimize_ansatz(g, a, cfg)
    _emit(optimizer.runs_csv(records), args.csv)
    if args.svg:
        vals = [r.alpha for r in records]
        harness.emit_plot([harness.ExperimentRecord.from_values("runs", a.M, vals)], path=args.svg,
                          xlabel="parameter count M", ylabel="mean alpha")
    return EXIT_OK if all(r.converged_by in ("gtol", "ftol") for r in records) else EXIT_NONCONVERGED


def cmd_gw(args):
    g = graph.read_graph(args.graph)
    res = gw_maxcut(g, GwConfig(rounding_trials=args.trials, seed=args.seed or 0))
    width = (g.n_vertices + 3) // 4
    lines = ["cut_hex,value,relaxation,iterations,converged\n",
             f"0x{res.cut:0{width}x},{res.value:.17g},{res.relaxation:.17g},{res.iterations},{str(res.converged).lower()}\n"]
    _emit("".join(lines), args.csv)
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_make_graph(args):
    kind = "k-regular" if args.kind == "kregular" else args.kind
    gen = graph.GraphGenerator(kind, args.n, (args.wmin, args.wmax), args.seed or 0, args.k)
    g = graph.generate(gen)
    _emit(graph.format_graph(g), args.out or args.csv)
    return EXIT_OK


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None, help="worker processes for instance-level jobs")
    common.add_argument("--csv", default=None, help="write CSV here instead of stdout")
    common.add_argument("--svg", default=None, help="write an SVG plot here")
    common.add_argument("--config", default=None, help="key = value file mirroring ExperimentConfig")

    p = argparse.ArgumentParser(prog="cutscape", description="X-ansatz MaxCut landscapes and experiments")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.set_defaults(fn=fn)
        return s

    def sweep_args(s):
        s.add_argument("--n", type=int)
        s.add_argument("--instances", type=int)
        s.add_argument("--restarts", type=int)
        s.add_argument("--max-iters", type=int)

    s = verb("landscape-audit", cmd_landscape_audit, "classify eigenstate critical points")
    s.add_argument("--graph")
    s.add_argument("--ansatz", help="ansatz file or spec (default: full non-symmetric)")
    s.add_argument("--witness", action="store_true")
    s.add_argument("--n", type=int)
    s.add_argument("--instances", type=int)
    s.add_argument("--variants", type=_str_list)

    s = verb("sweep-depth", cmd_sweep_depth, "approximation ratio against k-body depth")
    sweep_args(s)
    s.add_argument("--depths", type=_int_list)
    s.add_argument("--quick", action="store_true", help=f"{QUICK_INSTANCES} instances")

    s = verb("sweep-xz", cmd_sweep_xz, "X against XZ ansatze")
    sweep_args(s)
    s.add_argument("--depths", type=_int_list)
    s.add_argument("--variants", type=_str_list)

    s = verb("compare-qaoa", cmd_compare_qaoa, "QAOA families against X/XZ by parameter count")
    sweep_args(s)
    s.add_argument("--layers", type=_int_list)
    s.add_argument("--depths", type=_int_list)
    s.add_argument("--variants", type=_str_list)

    s = verb("compare-gw", cmd_compare_gw, "single-qubit ansatz against the GW baseline")
    s.add_argument("--kind", default="kregular")
    s.add_argument("--n", type=int)
    s.add_argument("--degrees", type=_int_list)
    s.add_argument("--instances", type=int)
    s.add_argument("--rounding-trials", type=int)
    s.add_argument("--max-iters", type=int)

    s = verb("variance", cmd_variance, "gradient variance, closed form against Monte Carlo")
    s.add_argument("--graph")
    s.add_argument("--ansatz")
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--samples", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--instances", type=int)

    s = verb("flip", cmd_flip, "flip local search")
    s.add_argument("--graph", required=True)
    s.add_argument("--ansatz", required=True)
    s.add_argument("--policy", choices=flipsearch.POLICIES, default="greedy")
    s.add_argument("--trials", type=int, default=100)

    s = verb("optimize", cmd_optimize, "L-BFGS runs on one graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--ansatz-spec", required=True)
    s.add_argument("--restarts", type=int)
    s.add_argument("--max-iters", type=int)

    s = verb("gw", cmd_gw, "GW baseline on one graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--trials", type=int, default=100)

    s = verb("make-graph", cmd_make_graph, "write a random graph file")
    s.add_argument("--kind", default="complete", choices=(*graph.GRAPH_KINDS, "kregular"))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--wmin", type=float, default=0.0)
    s.add_argument("--wmax", type=float, default=5.0)
    s.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except graph.ResourceCapError as exc:
        print(f"cutscape: refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, KeyError, OSError, configparser.Error) as exc:
        print(f"cutscape: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except optimizer.OptimizerError as exc:
        print(f"cutscape: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
