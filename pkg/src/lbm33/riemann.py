"""Exact solution of the 1D Riemann problem for an ideal gas.

Standard construction (Courant & Friedrichs; Toro, ch. 4): the star pressure
is the root of ``f_L(p) + f_R(p) + u_R - u_L``, where each ``f_K`` follows the
Rankine-Hugoniot shock curve for ``p > p_K`` and the isentropic rarefaction
curve otherwise.  The solution is self-similar and sampled in ``xi = x / t``.
"""
import math
from dataclasses import dataclass

from .errors import VacuumFormation


@dataclass(frozen=True)
class GasState1D:
    rho: float
    u: float
    p: float

    def __post_init__(self):
        if not (self.rho > 0 and self.p > 0):
            raise ValueError(f"need rho > 0 and p > 0, got {self}")

    def sound_speed(self, gamma):
        return math.sqrt(gamma * self.p / self.rho)

    def mirrored(self):
        return GasState1D(self.rho, -self.u, self.p)


def _pressure_branch(p, state, gamma):
    """``f_K(p)``: velocity jump across the wave connecting ``state`` to pressure ``p``."""
    rho_k, p_k = state.rho, state.p
    a_k = state.sound_speed(gamma)
    if p > p_k:
        A = 2.0 / ((gamma + 1.0) * rho_k)
        B = (gamma - 1.0) / (gamma + 1.0) * p_k
        return (p - p_k) * math.sqrt(A / (p + B))
    return 2.0 * a_k / (gamma - 1.0) * ((p / p_k) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)


@dataclass(frozen=True)
class RiemannSolution:
    left: GasState1D
    right: GasState1D
    gamma: float
    p_star: float
    u_star: float

    @property
    def left_wave(self):
        if self.p_star > self.left.p:
            return "shock"
        if self.p_star < self.left.p:
            return "rarefaction"
        return "none"

    @property
    def right_wave(self):
        if self.p_star > self.right.p:
            return "shock"
        if self.p_star < self.right.p:
            return "rarefaction"
        return "none"

    @property
    def rho_star_left(self):
        return _star_density(self.left, self.p_star, self.gamma)

    @property
    def rho_star_right(self):
        return _star_density(self.right, self.p_star, self.gamma)

    def left_shock_speed(self):
        s = self.left
        g = self.gamma
        return s.u - s.sound_speed(g) * math.sqrt((g + 1) / (2 * g) * self.p_star / s.p + (g - 1) / (2 * g))

    def right_shock_speed(self):
        s = self.right
        g = self.gamma
        return s.u + s.sound_speed(g) * math.sqrt((g + 1) / (2 * g) * self.p_star / s.p + (g - 1) / (2 * g))

    def left_fan(self):
        """(head, tail) speeds of the left rarefaction."""
        g = self.gamma
        a_star = self.left.sound_speed(g) * (self.p_star / self.left.p) ** ((g - 1) / (2 * g))
        return self.left.u - self.left.sound_speed(g), self.u_star - a_star

    def right_fan(self):
        """(tail, head) speeds of the right rarefaction."""
        g = self.gamma
        a_star = self.right.sound_speed(g) * (self.p_star / self.right.p) ** ((g - 1) / (2 * g))
        return self.u_star + a_star, self.right.u + self.right.sound_speed(g)

    def wave_positions(self):
        """Characteristic speeds bounding each region, left to right."""
        out = {}
        if self.left_wave == "shock":
            out["left_shock"] = self.left_shock_speed()
        elif self.left_wave == "rarefaction":
            out["left_fan_head"], out["left_fan_tail"] = self.left_fan()
        out["contact"] = self.u_star
        if self.right_wave == "shock":
            out["right_shock"] = self.right_shock_speed()
        elif self.right_wave == "rarefaction":
            out["right_fan_tail"], out["right_fan_head"] = self.right_fan()
        return out


def _star_density(state, p_star, g):
    ratio = p_star / state.p
    if p_star > state.p:
        k = (g - 1.0) / (g + 1.0)
        return state.rho * (ratio + k) / (k * ratio + 1.0)
    return state.rho * ratio ** (1.0 / g)


def pressure_function(p, left, right, gamma):
    return _pressure_branch(p, left, gamma) + _pressure_branch(p, right, gamma) + (right.u - left.u)


def solve_star(left: GasState1D, right: GasState1D, gamma: float = 2.0, rtol: float = 1e-12) -> RiemannSolution:
    """Star-region pressure and velocity by bisection.

    Raises
    ------
    VacuumFormation
        If the states separate fast enough that no positive star pressure
        exists.
    """
    if not gamma > 1.0:
        raise ValueError(f"gamma must exceed 1, got {gamma!r}")
    if left == right:
        return RiemannSolution(left, right, gamma, left.p, left.u)

    lo = 1e-12 * min(left.p, right.p)
    hi = 10.0 * max(left.p, right.p)
    if pressure_function(lo, left, right, gamma) > 0:
        raise VacuumFormation(
            f"no positive star pressure for left={left}, right={right}, gamma={gamma}"
        )
    # strongly colliding states push the root past the nominal bracket
    while pressure_function(hi, left, right, gamma) < 0:
        hi *= 10.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if pressure_function(mid, left, right, gamma) < 0:
            lo = mid
        else:
            hi = mid
    p_star = 0.5 * (lo + hi)
    fl = _pressure_branch(p_star, left, gamma)
    fr = _pressure_branch(p_star, right, gamma)
    u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl)
    return RiemannSolution(left, right, gamma, p_star, u_star)


def _fan_state(state, xi, g, sign):
    """State inside a rarefaction fan; ``sign`` is -1 for the left fan, +1 for the right."""
    a = state.sound_speed(g)
    base = 2.0 / (g + 1.0) - sign * (g - 1.0) / ((g + 1.0) * a) * (state.u - xi)
    rho = state.rho * base ** (2.0 / (g - 1.0))
    u = 2.0 / (g + 1.0) * (-sign * a + (g - 1.0) / 2.0 * state.u + xi)
    p = state.p * base ** (2.0 * g / (g - 1.0))
    return GasState1D(rho, u, p)


def sample(solution: RiemannSolution, xi: float) -> GasState1D:
    """State at similarity coordinate ``xi = (x - x0) / t``."""
    s = solution
    g = s.gamma
    if xi <= s.u_star:
        side = s.left
        if s.left_wave == "none":
            return side
        if s.left_wave == "shock":
            if xi < s.left_shock_speed():
                return side
            return GasState1D(s.rho_star_left, s.u_star, s.p_star)
        head, tail = s.left_fan()
        if xi < head:
            return side
        if xi > tail:
            return GasState1D(s.rho_star_left, s.u_star, s.p_star)
        return _fan_state(side, xi, g, -1.0)
    side = s.right
    if s.right_wave == "none":
        return side
    if s.right_wave == "shock":
        if xi > s.right_shock_speed():
            return side
        return GasState1D(s.rho_star_right, s.u_star, s.p_star)
    tail, head = s.right_fan()
    if xi > head:
        return side
    if xi < tail:
        return GasState1D(s.rho_star_right, s.u_star, s.p_star)
    return _fan_state(side, xi, g, 1.0)


def sample_profile(solution: RiemannSolution, xis):
    """Vectorised convenience: lists of (rho, u, p) for each ``xi``."""
    states = [sample(solution, float(x)) for x in xis]
    return (
        [st.rho for st in states],
        [st.u for st in states],
        [st.p for st in states],
    )
