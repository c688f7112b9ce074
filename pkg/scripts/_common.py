"""Shared command-line plumbing for the experiment scripts."""
import argparse
import sys
import time
from pathlib import Path

from cutscape.harness import ExperimentConfig, run_experiment, with_overrides, write_outputs


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--quick", action="store_true", help="25 instances")
    return p


def run(name: str, config: ExperimentConfig, args) -> None:
    count = 25 if args.quick else args.instances
    config = with_overrides(config, seed=args.seed, threads=args.threads, instance_count=count)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    result = run_experiment(config)
    write_outputs(result, out / f"{name}.csv", out / f"{name}.svg")
    for rec in result.records:
        print(f"{rec.variant:>26} x={rec.x:<4} mean {rec.metric}={rec.mean:.4f} std={rec.std:.4f}")
    print(f"{name}: {config.instance_count} instances, {time.perf_counter() - t0:.1f}s -> {out}/{name}.csv", file=sys.stderr)
