"""Exhaustive landscape audit (local optima counts) and gradient-variance audit."""
from _common import parser, run

from cutscape.harness import ExperimentConfig

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--n", type=int, nargs="+", default=[3, 4, 5, 6, 8, 10])
    p.add_argument("--samples", type=int, default=100_000)
    args = p.parse_args()
    for n in args.n:
        variants = ("full", "classical", "path", "ring") if n <= 12 else ("classical", "path", "ring")
        run(f"landscape_n{n}", ExperimentConfig("landscape_audit", n=n, variants=variants), args)
    for n in (n for n in args.n if n <= 6):
        run(f"variance_n{n}", ExperimentConfig("variance_audit", n=n, samples=args.samples), args)
