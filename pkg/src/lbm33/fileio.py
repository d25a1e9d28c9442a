"""Text formats: grid fields, profile CSV, run manifest.

Grid file (doubles as initial-condition input)::

    nx ny ncomp
    rho_A rho_B ux uy theta        # one line per node, y outer, x inner

Numbers are written with 17 significant digits so a write/read cycle is
bit-exact.
"""
import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .equilibrium import macro_fields
from .errors import GridFileError

PROFILE_COLUMNS = ("x", "rho_total", "rho_A", "rho_B", "ux", "theta", "p", "rho_riemann")


def fmt(value) -> str:
    return f"{float(value):.17g}"


@dataclass
class GridData:
    """Macroscopic fields on an ``(nx, ny)`` grid."""

    rho_a: np.ndarray
    rho_b: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    theta: np.ndarray
    ncomp: int = 2

    @property
    def shape(self):
        return self.rho_a.shape

    def validate(self):
        if not np.all(self.rho_a + self.rho_b > 0):
            raise GridFileError("grid has nodes with rho_A + rho_B <= 0")
        if not np.all(self.theta > 0):
            raise GridFileError("grid has nodes with theta <= 0")
        if np.any(self.rho_a < 0) or np.any(self.rho_b < 0):
            raise GridFileError("grid has negative component densities")


def grid_from_mixture(mixture, lattice) -> GridData:
    """Component densities plus the shared velocity and temperature of the mixture."""
    n_s = len(mixture.names)
    if n_s not in (1, 2):
        raise ValueError(f"grid format holds one or two components, got {n_s}")
    tot = macro_fields(lattice, mixture.total())
    rho_a = mixture.data[0].sum(axis=0)
    rho_b = mixture.data[1].sum(axis=0) if n_s == 2 else np.zeros_like(rho_a)
    return GridData(rho_a, rho_b, tot.ux, tot.uy, tot.theta, ncomp=n_s)


def write_grid(grid: GridData, path):
    nx, ny = grid.shape
    cols = [grid.rho_a, grid.rho_b, grid.ux, grid.uy, grid.theta]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"{nx} {ny} {grid.ncomp}\n")
        for y in range(ny):
            for x in range(nx):
                fh.write(" ".join(fmt(c[x, y]) for c in cols) + "\n")
    return path


def write_field(mixture, lattice, path):
    return write_grid(grid_from_mixture(mixture, lattice), path)


def read_grid(path) -> GridData:
    path = Path(path)
    try:
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 3:
                raise GridFileError(f"{path}: header must be 'nx ny ncomp'")
            nx, ny, ncomp = (int(v) for v in header)
            values = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise GridFileError(f"{path}: {exc}") from None
    if ncomp not in (1, 2):
        raise GridFileError(f"{path}: ncomp must be 1 or 2, got {ncomp}")
    if values.shape != (nx * ny, 5):
        raise GridFileError(f"{path}: expected {nx * ny} rows of 5 values, got {values.shape}")
    # rows run x fastest, so reshape to (ny, nx) then transpose to (nx, ny)
    cols = [np.ascontiguousarray(values[:, k].reshape(ny, nx).T) for k in range(5)]
    return GridData(*cols, ncomp=ncomp)


def write_profile(record, path):
    """One CSV per output record; ``rho_riemann`` left empty when absent."""
    prof = record.profile
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    riemann = prof.get("rho_riemann")
    if prof["rho_B"] is not None:
        gap = np.max(np.abs(prof["rho_A"] + prof["rho_B"] - prof["rho_total"]))
        if gap > 1e-12 * max(1.0, float(np.max(prof["rho_total"]))):
            raise ValueError(f"component densities do not add up to the total (gap {gap:.3e})")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROFILE_COLUMNS)
        for k, x in enumerate(prof["x"]):
            row = [str(int(x))]
            for name in PROFILE_COLUMNS[1:-1]:
                col = prof[name]
                row.append(fmt(col[k]) if col is not None else "")
            row.append(fmt(riemann[k]) if riemann is not None else "")
            writer.writerow(row)
    return path


def read_profile(path):
    """Columns of a profile CSV as float arrays (empty columns become ``None``)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    out = {}
    for k, name in enumerate(header):
        cells = [r[k] for r in body]
        out[name] = None if all(c == "" for c in cells) else np.array([float(c) for c in cells])
    return out


def write_manifest(manifest: dict, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
