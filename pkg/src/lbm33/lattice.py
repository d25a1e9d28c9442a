"""Discrete velocity sets on the square lattice.

A lattice is built from a handful of shell representatives. Each
representative is expanded to its orbit under the reflections in the x-axis,
the y-axis and the diagonal y=x; all members of an orbit share one weight.
The scaling constant ``c`` and the shell weights are the solution of a square
nonlinear system matching discrete velocity moments to the moments of the
Gaussian weight ``exp(-v**2)``::

    sum_i w_i (c n_ix)**a (c n_iy)**b = Gamma((1+a)/2) Gamma((1+b)/2) / pi

for even ``a`` and ``b`` (zero otherwise).  With this weight function the
reference temperature is 1 and ``sum_i w_i v_ix**2 = 1/2``.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import NegativeWeight, NoConvergence, SingularJacobian

Vec2 = Tuple[int, int]

#: exponent pairs constrained for both D2V33 and D2V37
NINE_PAIRS: Tuple[Vec2, ...] = (
    (0, 0), (0, 2), (2, 2), (0, 4), (2, 4), (0, 6), (4, 4), (2, 6), (0, 8),
)

D2V33_SHELLS: Tuple[Vec2, ...] = (
    (0, 0), (1, 0), (2, 0), (3, 0), (1, 1), (2, 2), (4, 4), (2, 1),
)
# rounded values, good enough to land Newton in the right basin
_D2V33_GUESS = (0.82, (0.16, 0.14, 0.0056, 0.0011, 0.034, 8.4e-5, 3.5e-6, 0.013))

D2V37_SHELLS: Tuple[Vec2, ...] = (
    (0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1),
)
# Philippi et al. / Shan (2010) weights; c = r / sqrt(2) with r ~ 1.19698
_D2V37_GUESS = (0.85, (0.23, 0.11, 0.058, 0.014, 0.0054, 0.001, 0.00025, 0.00028))


def _reflections(v: Vec2) -> Tuple[Vec2, Vec2, Vec2]:
    x, y = v
    return (x, -y), (-x, y), (y, x)


def expand_orbit(representative: Sequence[int]) -> List[Vec2]:
    """Closure of ``representative`` under the square-lattice reflections.

    >>> expand_orbit((1, 0))
    [(-1, 0), (0, -1), (0, 1), (1, 0)]
    """
    start = (int(representative[0]), int(representative[1]))
    orbit = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for image in _reflections(v):
            if image not in orbit:
                orbit.add(image)
                frontier.append(image)
    return sorted(orbit)


@dataclass(frozen=True)
class Shell:
    direction: Vec2

    @property
    def orbit(self) -> List[Vec2]:
        return expand_orbit(self.direction)

    @property
    def multiplicity(self) -> int:
        return len(self.orbit)

    def symmetrized_moment(self, a: int, b: int) -> int:
        """Exact integer sum of ``n_x**a * n_y**b`` over the orbit."""
        return sum(nx ** a * ny ** b for nx, ny in self.orbit)


def gaussian_moment(a: int, b: int) -> float:
    if a % 2 or b % 2:
        return 0.0
    return math.gamma((1 + a) / 2) * math.gamma((1 + b) / 2) / math.pi


@dataclass(frozen=True)
class MomentSystem:
    exponent_pairs: Tuple[Vec2, ...]
    rhs: Tuple[float, ...]

    @classmethod
    def gaussian(cls, pairs: Sequence[Vec2] = NINE_PAIRS) -> "MomentSystem":
        pairs = tuple((int(a), int(b)) for a, b in pairs)
        return cls(pairs, tuple(gaussian_moment(a, b) for a, b in pairs))

    def __len__(self):
        return len(self.exponent_pairs)


@dataclass(frozen=True)
class Lattice:
    """An immutable discrete-velocity set.

    ``velocities`` holds the integer directions (also the streaming offsets);
    the physical velocity of direction ``i`` is ``c * velocities[i]``.
    """

    name: str
    c: float
    shells: Tuple[Shell, ...]
    shell_weights: Tuple[float, ...]
    velocities: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)
    shell_of: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vel, wts, owner = [], [], []
        for k, (shell, w) in enumerate(zip(self.shells, self.shell_weights)):
            for v in shell.orbit:
                vel.append(v)
                wts.append(w)
                owner.append(k)
        arrays = {
            "velocities": np.array(vel, dtype=np.int64).reshape(-1, 2),
            "weights": np.array(wts, dtype=np.float64),
            "shell_of": np.array(owner, dtype=np.int64),
        }
        for key, arr in arrays.items():
            arr.setflags(write=False)
            object.__setattr__(self, key, arr)

    @property
    def q(self) -> int:
        return len(self.velocities)

    @property
    def physical_velocities(self) -> np.ndarray:
        return self.c * self.velocities.astype(np.float64)

    @property
    def max_offset(self) -> int:
        return int(np.abs(self.velocities).max())

    def index_of(self, v: Sequence[int]) -> int:
        hits = np.flatnonzero((self.velocities[:, 0] == v[0]) & (self.velocities[:, 1] == v[1]))
        if len(hits) == 0:
            raise KeyError(f"{tuple(v)} is not a velocity of {self.name}")
        return int(hits[0])

    def permutation(self, transform) -> np.ndarray:
        """Index permutation ``p`` with ``velocities[p[i]] == transform(velocities[i])``."""
        return np.array([self.index_of(transform(tuple(v))) for v in self.velocities])


def _residual_and_jacobian(shells, system, c, w, solve_c):
    n_eq = len(system)
    res = np.empty(n_eq)
    jac = np.zeros((n_eq, len(shells) + (1 if solve_c else 0)))
    for row, ((a, b), target) in enumerate(zip(system.exponent_pairs, system.rhs)):
        order = a + b
        sym = np.array([float(s.symmetrized_moment(a, b)) for s in shells])
        scale = c ** order
        res[row] = scale * (sym @ w) - target
        col = 0
        if solve_c:
            jac[row, 0] = order * c ** (order - 1) * (sym @ w) if order else 0.0
            col = 1
        jac[row, col:] = scale * sym
    return res, jac


def solve_moment_system(shells, system, initial_guess, tol=1e-13, max_iter=200):
    """Damped Newton iteration for the scaling constant and shell weights.

    Parameters
    ----------
    shells : sequence of Shell
    system : MomentSystem
        Must have one equation per unknown.  When ``c`` cannot influence any
        residual (all pairs of order zero, or only the rest shell) it is fixed
        to 1 and the system must have one equation per shell.
    initial_guess : (c0, weights0)

    Returns
    -------
    c, shell_weights : float, list of float
    """
    shells = [s if isinstance(s, Shell) else Shell(tuple(s)) for s in shells]
    c0, w0 = initial_guess
    w = np.array(w0, dtype=np.float64)
    if len(w) != len(shells):
        raise ValueError("initial guess needs one weight per shell")
    if c0 <= 0 or np.any(w <= 0):
        raise ValueError("initial guess must be positive")

    c_free = any(a + b > 0 for a, b in system.exponent_pairs) and any(
        s.direction != (0, 0) for s in shells
    )
    n_unknown = len(shells) + (1 if c_free else 0)
    if n_unknown != len(system):
        raise ValueError(f"{n_unknown} unknowns but {len(system)} equations")
    c = float(c0) if c_free else 1.0

    def unpack(x):
        return (x[0], x[1:]) if c_free else (c, x)

    x = np.concatenate([[c], w]) if c_free else w.copy()
    res, jac = _residual_and_jacobian(shells, system, *unpack(x), c_free)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm < tol:
            break
        try:
            if not np.isfinite(np.linalg.cond(jac)) or np.linalg.cond(jac) > 1e15:
                raise np.linalg.LinAlgError
            dx = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            raise SingularJacobian(f"singular Jacobian at c={unpack(x)[0]!r}") from None
        step = 1.0
        while True:
            trial = x + step * dx
            t_res, t_jac = _residual_and_jacobian(shells, system, *unpack(trial), c_free)
            t_norm = np.max(np.abs(t_res))
            if t_norm < norm or step < 2.0 ** -30:
                break
            step *= 0.5
        if not t_norm < norm:
            # stalled: accept only if already at round-off level
            break
        x, res, jac, norm = trial, t_res, t_jac, t_norm
    if not norm < tol:
        raise NoConvergence(f"moment residual {norm:.3e} did not reach {tol:.0e}")

    c, w = unpack(x)
    if c <= 0:
        raise NegativeWeight(f"converged to non-positive c={c!r}")
    if np.any(w <= 0):
        raise NegativeWeight(f"converged to non-positive shell weights {w.tolist()}")
    return float(c), [float(v) for v in w]


def build_lattice(name, shells, initial_guess, pairs=NINE_PAIRS) -> Lattice:
    shells = tuple(Shell(tuple(s)) for s in shells)
    c, w = solve_moment_system(shells, MomentSystem.gaussian(pairs), initial_guess)
    return Lattice(name, c, shells, tuple(w))


@lru_cache(maxsize=None)
def build_d2v33() -> Lattice:
    return build_lattice("d2v33", D2V33_SHELLS, _D2V33_GUESS)


@lru_cache(maxsize=None)
def build_d2v37() -> Lattice:
    return build_lattice("d2v37", D2V37_SHELLS, _D2V37_GUESS)


LATTICES = {"d2v33": build_d2v33, "d2v37": build_d2v37}


def get_lattice(name: str) -> Lattice:
    try:
        return LATTICES[name.lower()]()
    except KeyError:
        raise KeyError(f"unknown lattice {name!r}; choose from {sorted(LATTICES)}") from None


def moment(lattice: Lattice, a: int, b: int) -> float:
    v = lattice.physical_velocities
    return float(np.sum(lattice.weights * v[:, 0] ** a * v[:, 1] ** b))


@dataclass
class IsotropyReport:
    lattice: str
    max_order: int
    tolerance: float
    residuals: Dict[Vec2, float]

    @property
    def failures(self) -> List[Vec2]:
        return [ab for ab, r in self.residuals.items() if r > self.tolerance]

    @property
    def ok(self) -> bool:
        return not self.failures

    def format(self) -> str:
        lines = [f"lattice {self.lattice}", f"max_order {self.max_order}", "a b residual status"]
        for (a, b), r in self.residuals.items():
            status = "FAIL" if r > self.tolerance else "ok"
            lines.append(f"{a} {b} {r:.3e} {status}")
        return "\n".join(lines) + "\n"


def verify_isotropy(lattice: Lattice, max_order: int, tolerance: float = 1e-10) -> IsotropyReport:
    """Compare every moment with ``a + b <= max_order`` against the Gaussian value."""
    residuals = {}
    for order in range(max_order + 1):
        for a in range(order, -1, -1):
            b = order - a
            residuals[(a, b)] = abs(moment(lattice, a, b) - gaussian_moment(a, b))
    return IsotropyReport(lattice.name, max_order, tolerance, residuals)


def dump_lattice(lattice: Lattice) -> str:
    lines = [f"name {lattice.name}", f"c {lattice.c:.17g}", "index n_x n_y weight"]
    for i, ((nx, ny), w) in enumerate(zip(lattice.velocities, lattice.weights)):
        lines.append(f"{i} {nx} {ny} {w:.17g}")
    return "\n".join(lines) + "\n"
