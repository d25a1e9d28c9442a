"""The validation experiments: shock tube, striped two-component tube, and a
two-component flow from an arbitrary initial grid.

Unit mapping used for the Riemann overlay: lattice density and temperature
are given to the oracle as ``(rho, p = rho * theta)``, so equal temperatures
with a 4:1 density ratio become ``(4, 4)`` vs ``(1, 1)``.  The lattice gas
itself has pressure ``rho * theta / 2`` (two translational degrees of
freedom, gamma = 2), so oracle speeds are ``sqrt(2)`` times the lattice
speeds.  Node spacing is ``c`` and the time step is 1, giving

    node offset from the diaphragm = xi_oracle * t / (sqrt(2) * c).

Densities in the Riemann solution do not depend on this scale.
"""
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .equilibrium import MacroState, equilibrium, equilibrium_field, macro_fields
from .errors import ConfigError, GridFileError
from .fileio import GridData, grid_from_mixture, read_grid
from .kernel import (
    BoundarySpec,
    Diagnostics,
    DirichletEquilibrium,
    Mixture,
    Periodic,
    Solver,
    Symmetric,
    diagnostics,
)
from .lattice import LATTICES, Lattice, get_lattice
from .riemann import GasState1D, RiemannSolution, sample, solve_star

#: oracle speed / lattice speed; see module docstring
ORACLE_SPEED_RATIO = math.sqrt(2.0)

BUNDLED_PREFIX = "bundled:"

#: largest accepted relative rebound of a shock-tube density profile
MONOTONE_TOL = 1e-3


@dataclass
class ShockTubeInit:
    rho_left: float = 4.0
    rho_right: float = 1.0
    theta: float = 1.0


@dataclass
class StripInit:
    base: ShockTubeInit = field(default_factory=ShockTubeInit)
    strips: int = 10


@dataclass
class GridFileInit:
    path: str = BUNDLED_PREFIX + "complex_geometry_200x200.grid"


InitialCondition = Union[ShockTubeInit, StripInit, GridFileInit]


@dataclass
class BoundaryChoice:
    """Boundary kinds by name; Dirichlet states come from the initial condition."""

    left: str = "dirichlet"
    right: str = "dirichlet"
    top: str = "symmetric"
    bottom: str = "symmetric"


@dataclass
class ScenarioConfig:
    lattice_name: str = "d2v33"
    nx: int = 1000
    ny: int = 8
    omega: float = 1.0
    steps: int = 250
    output_times: Tuple[float, ...] = (0.2, 0.6, 1.0)
    initial: InitialCondition = field(default_factory=ShockTubeInit)
    boundaries: BoundaryChoice = field(default_factory=BoundaryChoice)
    output_prefix: str = "out/shock_tube"
    write_fields: bool = False
    gamma: float = 2.0
    window: int = 20

    def validate(self):
        if self.lattice_name not in LATTICES:
            raise ConfigError(f"lattice: unknown lattice {self.lattice_name!r}")
        if self.nx < 1 or self.ny < 1:
            raise ConfigError("nx/ny: grid dimensions must be positive")
        if not 0.0 < self.omega <= 2.0:
            raise ConfigError(f"omega: must lie in (0, 2], got {self.omega!r}")
        if self.steps < 0:
            raise ConfigError(f"steps: must be non-negative, got {self.steps!r}")
        times = tuple(self.output_times)
        if any(not 0.0 <= t <= 1.0 for t in times) or list(times) != sorted(times):
            raise ConfigError("output_times: must be sorted and within [0, 1]")
        if not self.gamma > 1.0:
            raise ConfigError("gamma: must exceed 1")
        if self.window < 0:
            raise ConfigError("window: must be non-negative")
        b = self.boundaries
        for side in ("left", "right"):
            if getattr(b, side) not in ("dirichlet", "periodic"):
                raise ConfigError(f"{side}: must be 'dirichlet' or 'periodic'")
        for side in ("top", "bottom"):
            if getattr(b, side) not in ("symmetric", "periodic"):
                raise ConfigError(f"{side}: must be 'symmetric' or 'periodic'")
        if (b.left == "periodic") != (b.right == "periodic"):
            raise ConfigError("left/right: periodic must be paired")
        if (b.top == "periodic") != (b.bottom == "periodic"):
            raise ConfigError("top/bottom: periodic must be paired")
        init = self.initial
        base = init.base if isinstance(init, StripInit) else init
        if isinstance(base, ShockTubeInit):
            if not (base.rho_left > 0 and base.rho_right > 0 and base.theta > 0):
                raise ConfigError("rho_left/rho_right/theta: must be positive")
        if isinstance(init, StripInit) and not 2 <= init.strips <= self.nx:
            raise ConfigError(f"strips: need 2 <= strips <= nx, got {init.strips}")
        if isinstance(init, GridFileInit) and b.left == "dirichlet":
            raise ConfigError("left: grid-file initial conditions support periodic x boundaries only")
        return self

    @property
    def is_shock_tube(self):
        return isinstance(self.initial, (ShockTubeInit, StripInit))

    def output_steps(self) -> List[int]:
        """Distinct step indices ``round(t' * steps)`` in increasing order."""
        seen = []
        for t in self.output_times:
            k = int(round(t * self.steps))
            if k not in seen:
                seen.append(k)
        return seen


def _shock_state(init: ShockTubeInit, side):
    return MacroState(init.rho_left if side == "left" else init.rho_right, (0.0, 0.0), init.theta)


def _boundaries(config: ScenarioConfig, fractions=None) -> BoundarySpec:
    b = config.boundaries
    init = config.initial
    base = init.base if isinstance(init, StripInit) else init
    x_sides = {}
    for side in ("left", "right"):
        if getattr(b, side) == "periodic":
            x_sides[side] = Periodic()
        else:
            fr = None if fractions is None else fractions[side]
            x_sides[side] = DirichletEquilibrium(_shock_state(base, side), fr)
    y_kind = Periodic() if b.top == "periodic" else Symmetric()
    return BoundarySpec(x_sides["left"], x_sides["right"], y_kind, y_kind)


def init_shock_tube(config: ScenarioConfig, lattice: Optional[Lattice] = None):
    """Single-component tube at rest: left half at ``rho_left``, right half at ``rho_right``.

    Returns ``(mixture, boundary_spec)``.
    """
    if not isinstance(config.initial, ShockTubeInit):
        raise ConfigError("initial: expected a shock_tube initial condition")
    lattice = lattice or get_lattice(config.lattice_name)
    base = config.initial
    data = np.empty((lattice.q, config.nx, config.ny))
    left = config.nx // 2
    data[:, :left] = equilibrium(lattice, _shock_state(base, "left"))[:, None, None]
    data[:, left:] = equilibrium(lattice, _shock_state(base, "right"))[:, None, None]
    return Mixture.single(data), _boundaries(config)


def strip_index(nx, strips):
    """Strip number of each column; the remainder columns join the last strip."""
    width = nx // strips
    return np.minimum(np.arange(nx) // width, strips - 1)


def init_strips(config: ScenarioConfig, lattice: Optional[Lattice] = None):
    """Shock tube split into vertical strips filled alternately with A and B."""
    if not isinstance(config.initial, StripInit):
        raise ConfigError("initial: expected a strips initial condition")
    lattice = lattice or get_lattice(config.lattice_name)
    single = replace(config, initial=config.initial.base)
    tube, _ = init_shock_tube(single, lattice)
    owner = strip_index(config.nx, config.initial.strips) % 2
    data = np.zeros((2, lattice.q, config.nx, config.ny))
    for comp in (0, 1):
        cols = owner == comp
        data[comp][:, cols] = tube.data[0][:, cols]
    fractions = {
        "left": tuple(float(owner[0] == k) for k in (0, 1)),
        "right": tuple(float(owner[-1] == k) for k in (0, 1)),
    }
    return Mixture(("A", "B"), data), _boundaries(config, fractions)


def resolve_grid_path(path: str) -> Path:
    if path.startswith(BUNDLED_PREFIX):
        name = path[len(BUNDLED_PREFIX):]
        return Path(str(resources.files("lbm33") / "data" / name))
    return Path(path)


def mixture_from_grid(grid: GridData, lattice: Lattice) -> Mixture:
    grid.validate()
    eq = [equilibrium_field(lattice, rho, grid.ux, grid.uy, grid.theta) for rho in (grid.rho_a, grid.rho_b)]
    if grid.ncomp == 1:
        return Mixture(("A",), eq[0][None])
    return Mixture(("A", "B"), np.stack(eq))


def init_from_grid_file(config: ScenarioConfig, lattice: Optional[Lattice] = None):
    """Two-component mixture at local equilibrium from a grid file."""
    if not isinstance(config.initial, GridFileInit):
        raise ConfigError("initial: expected a grid_file initial condition")
    lattice = lattice or get_lattice(config.lattice_name)
    grid = read_grid(resolve_grid_path(config.initial.path))
    if grid.shape != (config.nx, config.ny):
        raise GridFileError(f"grid file is {grid.shape[0]}x{grid.shape[1]}, config expects {config.nx}x{config.ny}")
    return mixture_from_grid(grid, lattice), _boundaries(config)


def initialize(config: ScenarioConfig, lattice: Optional[Lattice] = None):
    init = config.initial
    if isinstance(init, ShockTubeInit):
        return init_shock_tube(config, lattice)
    if isinstance(init, StripInit):
        return init_strips(config, lattice)
    return init_from_grid_file(config, lattice)


def illustrative_grid(nx=200, ny=200) -> GridData:
    """Made-up two-component layout for the complex-geometry run.

    The regions only imitate the flavour of an irregular initial condition
    (blobs, a bar, a ring); they are not measured or published data.
    Pressure equals density (theta = 1) and the flow is at rest.
    """
    x, y = np.meshgrid((np.arange(nx) + 0.5) / nx, (np.arange(ny) + 0.5) / ny, indexing="ij")
    rho_a = np.full((nx, ny), 0.5)
    rho_b = np.full((nx, ny), 0.5)
    disc = (x - 0.3) ** 2 + (y - 0.65) ** 2 < 0.15 ** 2
    rho_a[disc], rho_b[disc] = 2.0, 0.0
    bar = (np.abs(x - 0.7) < 0.08) & (np.abs(y - 0.5) < 0.3)
    rho_a[bar], rho_b[bar] = 0.0, 1.5
    r = np.hypot(x - 0.3, y - 0.25)
    ring = (r > 0.08) & (r < 0.14)
    rho_a[ring], rho_b[ring] = 1.0, 1.0
    square = (np.abs(x - 0.75) < 0.1) & (np.abs(y - 0.9) < 0.06)
    rho_a[square], rho_b[square] = 0.25, 0.0
    zeros = np.zeros((nx, ny))
    return GridData(rho_a, rho_b, zeros, zeros.copy(), np.ones((nx, ny)), ncomp=2)


# ---------------------------------------------------------------- running


def diaphragm(nx):
    """x coordinate (in node units, node i centred at i + 0.5) of the initial jump."""
    return float(nx // 2)


def node_positions(nx):
    return np.arange(nx) + 0.5


def riemann_solution(config: ScenarioConfig) -> RiemannSolution:
    init = config.initial
    base = init.base if isinstance(init, StripInit) else init
    left = GasState1D(base.rho_left, 0.0, base.rho_left * base.theta)
    right = GasState1D(base.rho_right, 0.0, base.rho_right * base.theta)
    return solve_star(left, right, config.gamma)


def wave_node(speed, step, c, nx):
    """Node coordinate reached after ``step`` steps by an oracle wave of ``speed``."""
    return diaphragm(nx) + speed * step / (ORACLE_SPEED_RATIO * c)


def riemann_density(solution: RiemannSolution, step: int, c: float, nx: int) -> np.ndarray:
    """Oracle density at every node centre after ``step`` steps."""
    offset = node_positions(nx) - diaphragm(nx)
    if step == 0:
        return np.where(offset < 0, solution.left.rho, solution.right.rho)
    xis = offset * ORACLE_SPEED_RATIO * c / step
    return np.array([sample(solution, float(xi)).rho for xi in xis])


@dataclass
class OutputRecord:
    step: int
    t_rel: float
    profile: dict
    diagnostics: Diagnostics
    grid: Optional[GridData] = None


def longitudinal_profile(mixture: Mixture, lattice: Lattice) -> dict:
    """y-averaged profiles of total/component density, u_x, theta and p = rho*theta."""
    tot = macro_fields(lattice, mixture.total())
    comp = mixture.data.sum(axis=1)  # (S, nx, ny)
    rho_a = comp[0].mean(axis=1)
    rho_b = comp[1].mean(axis=1) if len(mixture.names) > 1 else np.zeros_like(rho_a)
    nx = tot.rho.shape[0]
    return {
        "x": np.arange(nx),
        "rho_total": tot.rho.mean(axis=1),
        "rho_A": rho_a,
        "rho_B": rho_b,
        "ux": tot.ux.mean(axis=1),
        "theta": tot.theta.mean(axis=1),
        "p": (tot.rho * tot.theta).mean(axis=1),
    }


def iterate(config: ScenarioConfig, lattice: Optional[Lattice] = None):
    """Yield ``(step, mixture)`` for step 0..steps; the mixture is updated in place."""
    config.validate()
    lattice = lattice or get_lattice(config.lattice_name)
    mixture, bcs = initialize(config, lattice)
    solver = Solver(lattice, config.omega, bcs, config.nx, config.ny)
    yield 0, mixture
    for k in range(1, config.steps + 1):
        solver.run(mixture, 1, start=k)
        yield k, mixture


def run(config: ScenarioConfig, lattice: Optional[Lattice] = None,
        on_step: Optional[Callable[[int, Mixture], None]] = None) -> List[OutputRecord]:
    """Step the scenario and collect one record per requested output time."""
    lattice = lattice or get_lattice(config.lattice_name)
    wanted = config.output_steps()
    solution = riemann_solution(config) if config.is_shock_tube else None
    records = []
    for k, mixture in iterate(config, lattice):
        if on_step is not None:
            on_step(k, mixture)
        if k not in wanted:
            continue
        profile = longitudinal_profile(mixture, lattice)
        profile["rho_riemann"] = (
            riemann_density(solution, k, lattice.c, config.nx) if solution is not None else None
        )
        diag = diagnostics(mixture, lattice)
        records.append(OutputRecord(
            step=k,
            t_rel=k / config.steps if config.steps else 0.0,
            profile=profile,
            diagnostics=diag,
            grid=grid_from_mixture(mixture, lattice) if config.write_fields else None,
        ))
        if k == wanted[-1]:
            break
    return records


# ---------------------------------------------------------------- comparisons


@dataclass
class PlateauReport:
    step: int
    rho_star_left: float
    rho_star_right: float
    left_error: float
    right_error: float
    left_nodes: Tuple[int, int]
    right_nodes: Tuple[int, int]
    monotone: bool
    rebound: float
    level_left: float
    level_right: float

    @property
    def max_error(self):
        return max(self.left_error, self.right_error)


def plateau_report(rho: np.ndarray, config: ScenarioConfig, step: int, c: float) -> PlateauReport:
    """Compare a simulated density profile with the oracle's star plateaus.

    The plateau windows run from the rarefaction tail to the contact and
    from the contact to the shock, each shrunk by ``config.window`` nodes at
    both ends.  ``level_*`` are the plateau medians.  Monotonicity is
    checked on the whole profile through the rebound
    ``max_j (rho_j - min_{i<=j} rho_i) / min_{i<=j} rho_i``, which is zero
    for a non-increasing profile; rebounds up to ``MONOTONE_TOL`` are
    accepted (the viscous solution drifts by ~1e-4 across the plateaus).
    """
    sol = riemann_solution(config)
    waves = sol.wave_positions()
    nx, w = config.nx, config.window
    pos = {name: wave_node(s, step, c, nx) for name, s in waves.items()}
    tail = pos.get("left_fan_tail", pos.get("left_shock"))
    front = pos.get("right_shock", pos.get("right_fan_tail"))
    centres = node_positions(nx)
    left_sel = (centres > tail + w) & (centres < pos["contact"] - w)
    right_sel = (centres > pos["contact"] + w) & (centres < front - w)
    if not left_sel.any() or not right_sel.any():
        raise ValueError("plateau windows are empty; increase steps or reduce the window")

    def worst(sel, target):
        return float(np.max(np.abs(rho[sel] - target)) / target)

    idx = np.flatnonzero(left_sel), np.flatnonzero(right_sel)
    running_min = np.minimum.accumulate(rho)
    rebound = float(np.max((rho - running_min) / running_min))
    return PlateauReport(
        step=step,
        rho_star_left=sol.rho_star_left,
        rho_star_right=sol.rho_star_right,
        left_error=worst(left_sel, sol.rho_star_left),
        right_error=worst(right_sel, sol.rho_star_right),
        left_nodes=(int(idx[0][0]), int(idx[0][-1])),
        right_nodes=(int(idx[1][0]), int(idx[1][-1])),
        monotone=rebound <= MONOTONE_TOL,
        rebound=rebound,
        level_left=float(np.median(rho[left_sel])) / sol.rho_star_left - 1.0,
        level_right=float(np.median(rho[right_sel])) / sol.rho_star_right - 1.0,
    )


def relative_l2_physical(rho_a, c_a, rho_b, c_b, nx_a, nx_b):
    """Relative L2 gap between two profiles placed on physical coordinates.

    Node spacing is ``c`` on each lattice, so both profiles are laid out at
    ``c * (node centre - diaphragm)`` and profile ``b`` is linearly
    interpolated onto the nodes of ``a``.
    """
    xa = c_a * (node_positions(nx_a) - diaphragm(nx_a))
    xb = c_b * (node_positions(nx_b) - diaphragm(nx_b))
    inside = (xa >= xb[0]) & (xa <= xb[-1])
    b_on_a = np.interp(xa[inside], xb, rho_b)
    return float(np.linalg.norm(rho_a[inside] - b_on_a) / np.linalg.norm(rho_a[inside]))


def compare_lattices(config: ScenarioConfig, first="d2v33", second="d2v37") -> dict:
    """Final-time density profiles of the same scenario on two lattices."""
    final = replace(config, output_times=(1.0,), write_fields=False)
    out = {}
    for name in (first, second):
        lat = get_lattice(name)
        rec = run(replace(final, lattice_name=name), lat)[-1]
        out[name] = (rec.profile["rho_total"], lat.c)
    (ra, ca), (rb, cb) = out[first], out[second]
    return {
        "lattices": [first, second],
        "step": final.steps,
        "relative_l2": relative_l2_physical(ra, ca, rb, cb, config.nx, config.nx),
        "profiles": {k: v[0] for k, v in out.items()},
    }
