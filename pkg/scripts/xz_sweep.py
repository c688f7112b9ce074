"""X-ansatz against the two XZ variants at matched k-body depth (n = 8)."""
from _common import parser, run

from cutscape.harness import ExperimentConfig

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--depths", type=int, nargs="+", default=[1, 2, 3, 4])
    args = p.parse_args()
    run("xz_sweep", ExperimentConfig("xz_sweep", n=8, depths=tuple(args.depths)), args)
