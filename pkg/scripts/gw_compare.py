"""Gradient-optimized single-qubit ansatz against the GW baseline on k-regular graphs."""
from _common import parser, run

from cutscape.harness import ExperimentConfig

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--degrees", type=int, nargs="+", default=list(range(2, 11)))
    p.add_argument("--rounding-trials", type=int, default=1)
    args = p.parse_args()
    if args.instances is None and not args.quick:
        args.instances = 50
    cfg = ExperimentConfig("gw_compare", n=args.n, degrees=tuple(args.degrees), rounding_trials=args.rounding_trials)
    run("gw_compare", cfg, args)
