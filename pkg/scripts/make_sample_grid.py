"""Write the illustrative 200x200 two-component initial condition shipped with the package.

The layout is invented (the original figure's values are not recoverable);
see ``lbm33.scenarios.illustrative_grid``.
"""
import argparse
from pathlib import Path

from lbm33.fileio import write_grid
from lbm33.scenarios import illustrative_grid

DEFAULT = Path(__file__).resolve().parents[1] / "src" / "lbm33" / "data" / "complex_geometry_200x200.grid"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nx", type=int, default=200)
    ap.add_argument("--ny", type=int, default=200)
    ap.add_argument("-o", "--output", default=str(DEFAULT))
    args = ap.parse_args()
    print(write_grid(illustrative_grid(args.nx, args.ny), args.output))
