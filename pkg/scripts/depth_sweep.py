"""Approximation ratio of the X-ansatz against k-body depth on random weighted K_n."""
from _common import parser, run

from cutscape.harness import ExperimentConfig

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--n", type=int, nargs="+", default=[8], help="one sweep per vertex count")
    args = p.parse_args()
    for n in args.n:
        run(f"depth_sweep_n{n}", ExperimentConfig("depth_sweep", n=n), args)
