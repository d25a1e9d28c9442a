"""BGK collision and integer-offset streaming on a rectangular grid.

Populations are stored structure-of-arrays: ``data[s, i, x, y]`` for component
``s`` and velocity index ``i``.  Several components ("name tags") share the
lattice and the grid; they relax towards equilibria built from their own
density and the velocity/temperature of the summed populations, so the sum
over components evolves exactly like a single component.
"""
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numba
import numpy as np

from .equilibrium import MacroState, equilibrium, expansion
from .errors import NonPositiveDensity, OffsetExceedsGrid
from .lattice import Lattice

if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ and "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe, which warns on older system TBB builds
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class Symmetric:
    """Specular mirror: wall half a node outside the first/last row."""


@dataclass(frozen=True)
class DirichletEquilibrium:
    """Ghost columns pinned to the equilibrium of ``state`` every step.

    For mixtures, ``fractions`` splits the pinned density between components
    (one entry per component, in mixture order).  ``None`` means a single
    component.
    """

    state: MacroState
    fractions: Optional[Tuple[float, ...]] = None

    def ghost_shares(self, n_components):
        fr = (1.0,) if self.fractions is None else tuple(float(f) for f in self.fractions)
        if len(fr) != n_components:
            raise ValueError(f"Dirichlet boundary has {len(fr)} component fractions, mixture has {n_components}")
        return np.array(fr)


XBoundary = Union[Periodic, DirichletEquilibrium]
YBoundary = Union[Periodic, Symmetric]


@dataclass(frozen=True)
class BoundarySpec:
    left: XBoundary = Periodic()
    right: XBoundary = Periodic()
    top: YBoundary = Periodic()
    bottom: YBoundary = Periodic()

    def __post_init__(self):
        for side in ("left", "right"):
            if not isinstance(getattr(self, side), (Periodic, DirichletEquilibrium)):
                raise ValueError(f"{side} boundary must be Periodic or DirichletEquilibrium")
        for side in ("top", "bottom"):
            if not isinstance(getattr(self, side), (Periodic, Symmetric)):
                raise ValueError(f"{side} boundary must be Periodic or Symmetric")
        if isinstance(self.left, Periodic) != isinstance(self.right, Periodic):
            raise ValueError("left/right: Periodic must be paired")
        if isinstance(self.top, Periodic) != isinstance(self.bottom, Periodic):
            raise ValueError("top/bottom: Periodic must be paired")

    @classmethod
    def periodic(cls):
        return cls(Periodic(), Periodic(), Periodic(), Periodic())


@dataclass
class PopulationField:
    data: np.ndarray  # (Q, nx, ny)

    @property
    def q(self):
        return self.data.shape[0]

    @property
    def nx(self):
        return self.data.shape[1]

    @property
    def ny(self):
        return self.data.shape[2]


@dataclass
class Mixture:
    """Named components stacked into one ``(S, Q, nx, ny)`` array."""

    names: Tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        self.names = tuple(self.names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"component names must be unique: {self.names}")
        if self.data.ndim != 4 or self.data.shape[0] != len(self.names):
            raise ValueError("data must have shape (n_components, Q, nx, ny)")

    @classmethod
    def from_fields(cls, components: Dict[str, PopulationField]):
        fields = list(components.values())
        shapes = {f.data.shape for f in fields}
        if len(shapes) > 1:
            raise ValueError(f"components disagree on lattice/grid shape: {shapes}")
        data = np.stack([np.asarray(f.data, dtype=np.float64) for f in fields])
        return cls(tuple(components), data)

    @classmethod
    def single(cls, data, name="A"):
        return cls((name,), np.asarray(data, dtype=np.float64)[None].copy())

    @classmethod
    def empty(cls, q, nx, ny):
        return cls((), np.zeros((0, q, nx, ny)))

    def __getitem__(self, name) -> PopulationField:
        return PopulationField(self.data[self.names.index(name)])

    def copy(self):
        return Mixture(self.names, self.data.copy())

    def total(self) -> np.ndarray:
        """Summed populations, shape ``(Q, nx, ny)``."""
        return self.data.sum(axis=0)

    @property
    def shape(self):
        return self.data.shape[1:]


@numba.njit(parallel=True, cache=True)
def _collide_kernel(fs, vx, vy, w, omega, out):
    n_s, n_q, nx, ny = fs.shape
    bad = np.zeros(nx, dtype=np.int64)
    v2 = vx * vx + vy * vy
    for x in numba.prange(nx):
        rho_s = np.empty(n_s)
        for y in range(ny):
            rho = 0.0
            jx = 0.0
            jy = 0.0
            e = 0.0
            for i in range(n_q):
                t = fs[0, i, x, y]
                for s in range(1, n_s):
                    t += fs[s, i, x, y]
                rho += t
                jx += vx[i] * t
                jy += vy[i] * t
                e += v2[i] * t
            if not rho > 0.0:
                bad[x] = 1
                for s in range(n_s):
                    for i in range(n_q):
                        out[s, i, x, y] = fs[s, i, x, y]
                continue
            ux = jx / rho
            uy = jy / rho
            theta = e / rho - ux * ux - uy * uy
            for s in range(n_s):
                acc = 0.0
                for i in range(n_q):
                    acc += fs[s, i, x, y]
                rho_s[s] = acc
            for i in range(n_q):
                p = w[i] * expansion(ux, uy, theta, vx[i], vy[i])
                for s in range(n_s):
                    out[s, i, x, y] = (1.0 - omega) * fs[s, i, x, y] + omega * (rho_s[s] * p)
    return bad


def _check_omega(omega):
    if not 0.0 < omega <= 2.0:
        raise ValueError(f"omega must lie in (0, 2], got {omega!r}")


def collide_stack(data, lattice: Lattice, omega: float, out=None):
    """Collide an ``(S, Q, nx, ny)`` stack; components share (u, theta)."""
    _check_omega(omega)
    if out is None:
        out = np.empty_like(data)
    if data.shape[0] == 0:
        return out
    v = lattice.physical_velocities
    bad = _collide_kernel(data, v[:, 0].copy(), v[:, 1].copy(), lattice.weights.copy(), float(omega), out)
    if bad.any():
        rho = data.sum(axis=(0, 1))
        node = np.argwhere(~(rho > 0))[0]
        raise NonPositiveDensity(f"density {rho[tuple(node)]!r} is not positive", node=tuple(node))
    return out


def collide(field: PopulationField, lattice: Lattice, omega: float) -> PopulationField:
    """BGK relaxation ``f <- (1 - omega) f + omega f_eq(moments(f))`` at every node."""
    out = collide_stack(field.data[None], lattice, omega)
    return PopulationField(out[0])


class Streamer:
    """Precomputed streaming step for one lattice, grid size and boundary set.

    Out-of-domain reads are served from a ghost frame of width
    ``lattice.max_offset``: wrapped copies (Periodic), mirrored rows with the
    y-velocity negated (Symmetric), or pinned equilibria (DirichletEquilibrium).
    """

    def __init__(self, lattice: Lattice, nx: int, ny: int, boundaries: BoundarySpec):
        g = lattice.max_offset
        if nx < g or ny < g:
            raise OffsetExceedsGrid(f"grid {nx}x{ny} smaller than largest streaming offset {g}")
        self.lattice = lattice
        self.nx, self.ny, self.g = nx, ny, g
        self.boundaries = boundaries
        self.mirror_y = lattice.permutation(lambda v: (v[0], -v[1]))
        self._feq = {}
        for side in ("left", "right"):
            bc = getattr(boundaries, side)
            if isinstance(bc, DirichletEquilibrium):
                self._feq[side] = equilibrium(lattice, bc.state)

    def ghost(self, side, n_components):
        shares = getattr(self.boundaries, side).ghost_shares(n_components)
        return (shares[:, None] * self._feq[side][None, :])[:, :, None, None]

    def pad(self, data):
        """Ghost-framed copy of an ``(S, Q, nx, ny)`` stack."""
        g, nx, ny = self.g, self.nx, self.ny
        n_s, n_q = data.shape[:2]
        p = np.empty((n_s, n_q, nx + 2 * g, ny + 2 * g))
        p[:, :, g:g + nx, g:g + ny] = data
        b = self.boundaries
        if isinstance(b.left, Periodic):
            p[:, :, :g, g:g + ny] = data[:, :, nx - g:, :]
            p[:, :, g + nx:, g:g + ny] = data[:, :, :g, :]
        else:
            p[:, :, :g, g:g + ny] = self.ghost("left", n_s)
            p[:, :, g + nx:, g:g + ny] = self.ghost("right", n_s)
        # y ghosts built from the x-padded rows so corners stay consistent
        if isinstance(b.bottom, Periodic):
            p[:, :, :, :g] = p[:, :, :, ny:ny + g]
            p[:, :, :, g + ny:] = p[:, :, :, g:2 * g]
        else:
            m = self.mirror_y
            # ghost row -1-k mirrors interior row k
            p[:, :, :, :g] = p[:, m, :, 2 * g - 1:g - 1:-1]
            p[:, :, :, g + ny:] = p[:, m, :, g + ny - 1:ny - 1:-1]
        return p

    def __call__(self, data, out=None):
        if out is None:
            out = np.empty_like(data)
        p = self.pad(data)
        g, nx, ny = self.g, self.nx, self.ny
        for i, (ox, oy) in enumerate(self.lattice.velocities):
            out[:, i] = p[:, i, g - ox:g - ox + nx, g - oy:g - oy + ny]
        return out


def stream(field: PopulationField, lattice: Lattice, boundaries: BoundarySpec) -> PopulationField:
    """Move every population one step along its integer direction."""
    s = Streamer(lattice, field.nx, field.ny, boundaries)
    return PopulationField(s(field.data[None])[0])


class Solver:
    """Repeated collide-then-stream on a mixture with double buffering."""

    def __init__(self, lattice: Lattice, omega: float, boundaries: BoundarySpec, nx: int, ny: int):
        _check_omega(omega)
        self.lattice = lattice
        self.omega = float(omega)
        self.streamer = Streamer(lattice, nx, ny, boundaries)
        self._buffer = None

    def step(self, mixture: Mixture) -> Mixture:
        """Advance ``mixture`` in place by one step and return it."""
        data = mixture.data
        if self._buffer is None or self._buffer.shape != data.shape:
            self._buffer = np.empty_like(data)
        collide_stack(data, self.lattice, self.omega, out=self._buffer)
        self.streamer(self._buffer, out=data)
        return mixture

    def run(self, mixture: Mixture, steps: int, start: int = 0) -> Mixture:
        for k in range(steps):
            try:
                self.step(mixture)
            except NonPositiveDensity as exc:
                exc.step = start + k
                raise
        return mixture


def step(mixture: Mixture, lattice: Lattice, omega: float, boundaries: BoundarySpec) -> Mixture:
    """One step on a copy of ``mixture``: shared-moment collision, then streaming."""
    nx, ny = mixture.shape[1:]
    out = mixture.copy()
    Solver(lattice, omega, boundaries, nx, ny).step(out)
    return out


@dataclass
class Diagnostics:
    mass: float
    momentum: Tuple[float, float]
    energy: float
    rho_min: float
    rho_max: float
    component_mass: Dict[str, float] = field(default_factory=dict)
    finite: bool = True

    def as_dict(self):
        return {
            "mass": self.mass,
            "momentum": list(self.momentum),
            "energy": self.energy,
            "rho_min": self.rho_min,
            "rho_max": self.rho_max,
            "component_mass": dict(self.component_mass),
            "finite": self.finite,
        }


def _exact_sum(a) -> float:
    # fsum is correctly rounded, so the result cannot depend on summation order
    return math.fsum(np.ravel(a).tolist())


def diagnostics(mixture: Mixture, lattice: Lattice) -> Diagnostics:
    """Global sums: mass, momentum, energy (sum of |v|^2 f), density range."""
    if len(mixture.names) == 0:
        return Diagnostics(0.0, (0.0, 0.0), 0.0, 0.0, 0.0, {}, True)
    v = lattice.physical_velocities
    tot = mixture.total()
    rho = tot.sum(axis=0)
    return Diagnostics(
        mass=_exact_sum(tot),
        momentum=(
            _exact_sum(v[:, 0, None, None] * tot),
            _exact_sum(v[:, 1, None, None] * tot),
        ),
        energy=_exact_sum((v[:, 0] ** 2 + v[:, 1] ** 2)[:, None, None] * tot),
        rho_min=float(rho.min()),
        rho_max=float(rho.max()),
        component_mass={n: _exact_sum(mixture.data[k]) for k, n in enumerate(mixture.names)},
        finite=bool(np.isfinite(mixture.data).all()),
    )
