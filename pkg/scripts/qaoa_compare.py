"""QAOA variants against X and XZ ansatze, keyed by parameter count M (n = 8)."""
from _common import parser, run

from cutscape.harness import ExperimentConfig

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--layers", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6])
    args = p.parse_args()
    run("qaoa_compare", ExperimentConfig("qaoa_compare", n=8, layers=tuple(args.layers)), args)
