"""Fourth-order Hermite equilibrium and moment recovery.

Velocities passed to the polynomials are physical (``c * n``), since the
expansion mixes ``v`` with ``theta - 1`` and plain constants.  Temperature is
defined without a 1/D factor: ``rho * theta = sum_i |v_i - u|**2 f_i``, which
gives ``theta = 1`` for ``f = w``.
"""
from dataclasses import dataclass
from typing import Tuple

import numba
import numpy as np

from .errors import NonPositiveDensity
from .lattice import Lattice

INV_FACTORIALS = (1.0, 1.0, 1.0 / 2.0, 1.0 / 6.0, 1.0 / 24.0)


@dataclass(frozen=True)
class MacroState:
    rho: float
    u: Tuple[float, float] = (0.0, 0.0)
    theta: float = 1.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho!r}")
        if not self.theta >= 0:
            raise ValueError(f"theta must be non-negative, got {self.theta!r}")
        object.__setattr__(self, "u", (float(self.u[0]), float(self.u[1])))


@dataclass
class MacroFields:
    """Per-node macroscopic fields, arrays of shape ``(nx, ny)``."""

    rho: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    theta: np.ndarray


def hermite_term(n, u, theta, v):
    """``a^(n) . H^(n)`` for ``n`` in 0..4.

    ``u`` and ``v`` are 2-vectors; ``v`` may also be an array of shape
    ``(Q, 2)`` (or anything indexable as ``v[..., 0]``), in which case an
    array of Q values is returned.
    """
    v = np.asarray(v, dtype=np.float64)
    ux, uy = u
    vx, vy = v[..., 0], v[..., 1]
    uv = ux * vx + uy * vy
    u2 = ux * ux + uy * uy
    v2 = vx * vx + vy * vy
    dt = theta - 1.0
    if n == 0:
        return np.ones_like(uv)[()]
    if n == 1:
        return (2.0 * uv)[()]
    if n == 2:
        return (4.0 * uv ** 2 + 2.0 * dt * (v2 - 1.0) - 2.0 * u2)[()]
    if n == 3:
        return (4.0 * uv * (2.0 * uv ** 2 - 3.0 * u2 + 3.0 * dt * (-2.0 + v2)))[()]
    if n == 4:
        return (
            16.0 * uv ** 4
            - 48.0 * uv ** 2 * u2
            + 12.0 * u2 ** 2
            + 24.0 * dt * (2.0 * uv ** 2 * (v2 - 3.0) + (2.0 - v2) * u2)
            + 12.0 * dt ** 2 * (v2 ** 2 - 4.0 * v2 + 2.0)
        )[()]
    raise ValueError(f"Hermite order must be in 0..4, got {n}")


def equilibrium(lattice: Lattice, state: MacroState) -> np.ndarray:
    """Discrete equilibrium ``f_i^eq``, one value per lattice velocity.

    No clamping: entries can go negative far from the reference state.
    """
    v = lattice.physical_velocities
    series = sum(k * hermite_term(n, state.u, state.theta, v) for n, k in enumerate(INV_FACTORIALS))
    return state.rho * lattice.weights * series


@numba.njit(cache=True, inline="always")
def expansion(ux, uy, theta, vx, vy):
    """Scalar sum over n of ``a^(n).H^(n) / n!``; used in the collision loop."""
    uv = ux * vx + uy * vy
    u2 = ux * ux + uy * uy
    v2 = vx * vx + vy * vy
    dt = theta - 1.0
    uv2 = uv * uv
    h2 = 4.0 * uv2 + 2.0 * dt * (v2 - 1.0) - 2.0 * u2
    h3 = 4.0 * uv * (2.0 * uv2 - 3.0 * u2 + 3.0 * dt * (-2.0 + v2))
    h4 = (
        16.0 * uv2 * uv2
        - 48.0 * uv2 * u2
        + 12.0 * u2 * u2
        + 24.0 * dt * (2.0 * uv2 * (v2 - 3.0) + (2.0 - v2) * u2)
        + 12.0 * dt * dt * (v2 * v2 - 4.0 * v2 + 2.0)
    )
    return 1.0 + 2.0 * uv + h2 / 2.0 + h3 / 6.0 + h4 / 24.0


def moments(lattice: Lattice, f) -> MacroState:
    """Density, velocity and temperature of a single population vector."""
    f = np.asarray(f, dtype=np.float64)
    rho = float(np.sum(f))
    if not rho > 0:
        raise NonPositiveDensity(f"total density {rho!r} is not positive")
    v = lattice.physical_velocities
    u = (v.T @ f) / rho
    theta = float(np.sum(np.sum((v - u) ** 2, axis=1) * f)) / rho
    return MacroState(rho, (u[0], u[1]), theta)


def macro_fields(lattice: Lattice, data: np.ndarray) -> MacroFields:
    """Vectorised moments of a population array of shape ``(Q, nx, ny)``."""
    v = lattice.physical_velocities
    rho = data.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ux = np.tensordot(v[:, 0], data, axes=1) / rho
        uy = np.tensordot(v[:, 1], data, axes=1) / rho
        e = np.tensordot(v[:, 0] ** 2 + v[:, 1] ** 2, data, axes=1)
        theta = e / rho - ux * ux - uy * uy
    return MacroFields(rho, ux, uy, theta)


def equilibrium_field(lattice: Lattice, rho, ux, uy, theta) -> np.ndarray:
    """Equilibrium populations for per-node fields; returns ``(Q, *rho.shape)``."""
    rho, ux, uy, theta = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (rho, ux, uy, theta)))
    v = lattice.physical_velocities
    vx = v[:, 0].reshape((-1,) + (1,) * rho.ndim)
    vy = v[:, 1].reshape((-1,) + (1,) * rho.ndim)
    vv = np.stack([np.broadcast_to(vx, (len(v),) + rho.shape), np.broadcast_to(vy, (len(v),) + rho.shape)], axis=-1)
    series = sum(k * hermite_term(n, (ux, uy), theta, vv) for n, k in enumerate(INV_FACTORIALS))
    w = lattice.weights.reshape((-1,) + (1,) * rho.ndim)
    return rho * w * series
