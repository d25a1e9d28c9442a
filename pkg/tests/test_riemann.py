import math

import numpy as np
import pytest

from lbm33.errors import VacuumFormation
from lbm33.riemann import GasState1D, sample, solve_star

from oracles import riemann_star_oracle

TUBE = (GasState1D(4.0, 0.0, 4.0), GasState1D(1.0, 0.0, 1.0))

# brentq on an independent pressure function (tests/oracles.py), gamma = 2
TUBE_P_STAR = 1.8847417612832518
TUBE_U_STAR = 0.4850458296431944


def random_problems(n=20, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        left = GasState1D(rng.uniform(0.2, 5), rng.uniform(-1, 1), rng.uniform(0.2, 5))
        right = GasState1D(rng.uniform(0.2, 5), rng.uniform(-1, 1), rng.uniform(0.2, 5))
        gamma = rng.choice([1.4, 5 / 3, 2.0])
        try:
            out.append(solve_star(left, right, gamma))
        except VacuumFormation:
            continue
    return out


PROBLEMS = [solve_star(*TUBE, 2.0)] + random_problems()


def test_trivial_problem():
    s = GasState1D(1.3, 0.2, 0.7)
    sol = solve_star(s, s, 2.0)
    assert (sol.p_star, sol.u_star) == (0.7, 0.2)
    assert sol.left_wave == sol.right_wave == "none"
    for xi in (-5.0, 0.0, 0.2, 3.0):
        assert sample(sol, xi) == s


def test_tube_star_state():
    sol = solve_star(*TUBE, 2.0)
    assert round(sol.p_star, 2) == 1.88
    assert round(sol.u_star, 2) == 0.49
    assert sol.p_star == pytest.approx(TUBE_P_STAR, rel=1e-11)
    assert sol.u_star == pytest.approx(TUBE_U_STAR, rel=1e-10)
    assert (sol.left_wave, sol.right_wave) == ("rarefaction", "shock")


@pytest.mark.parametrize("sol", PROBLEMS[1:], ids=lambda s: f"g{s.gamma:.2f}")
def test_star_state_against_oracle(sol):
    l, r = sol.left, sol.right
    p, u = riemann_star_oracle(l.rho, l.u, l.p, r.rho, r.u, r.p, sol.gamma)
    assert sol.p_star == pytest.approx(p, rel=1e-10)
    assert sol.u_star == pytest.approx(u, abs=1e-10 * max(1.0, abs(u)))


def test_mirror_symmetry():
    for sol in PROBLEMS:
        mirrored = solve_star(sol.right.mirrored(), sol.left.mirrored(), sol.gamma)
        assert mirrored.p_star == pytest.approx(sol.p_star, rel=1e-11)
        assert mirrored.u_star == pytest.approx(-sol.u_star, abs=1e-11)
        for xi in np.linspace(-4, 4, 41):
            if any(abs(abs(xi) - abs(s)) < 1e-9 for s in sol.wave_positions().values()):
                continue
            a = sample(sol, xi)
            b = sample(mirrored, -xi)
            assert (b.rho, -b.u, b.p) == pytest.approx((a.rho, a.u, a.p), rel=1e-9, abs=1e-12)


def test_vacuum_detected():
    with pytest.raises(VacuumFormation):
        # pressure-positivity: 2 (a_L + a_R) / (gamma - 1) = 11.8 < 14
        solve_star(GasState1D(1.0, -7.0, 1.0), GasState1D(1.0, 7.0, 1.0), 1.4)


def test_far_field_limits():
    sol = solve_star(*TUBE, 2.0)
    assert sample(sol, -1e6) == TUBE[0]
    assert sample(sol, 1e6) == TUBE[1]


def test_tube_structure():
    sol = solve_star(*TUBE, 2.0)
    xis = np.linspace(-3, 3, 6001)
    states = [sample(sol, x) for x in xis]
    rho = np.array([s.rho for s in states])
    p = np.array([s.p for s in states])
    jumps = np.flatnonzero(np.abs(np.diff(rho)) > 0.05)
    # one jump at the contact and one at the shock; the fan is continuous
    assert len(jumps) == 2
    assert xis[jumps[0]] <= sol.u_star <= xis[jumps[0] + 1]
    assert xis[jumps[1]] <= sol.right_shock_speed() <= xis[jumps[1] + 1]
    head, tail = sol.left_fan()
    fan = (xis > head) & (xis < tail)
    assert np.all(np.diff(p[fan]) < 0)
    assert np.all(np.diff(rho) <= 0)


def _fluxes(s, speed, g):
    e = s.p / (g - 1) + 0.5 * s.rho * s.u ** 2
    return np.array([
        s.rho * (s.u - speed),
        s.rho * s.u * (s.u - speed) + s.p,
        e * (s.u - speed) + s.p * s.u,
    ])


@pytest.mark.parametrize("sol", PROBLEMS, ids=lambda s: f"p{s.p_star:.3f}")
def test_rankine_hugoniot(sol):
    eps = 1e-9
    g = sol.gamma
    for wave, speed_fn in (("left", sol.left_shock_speed), ("right", sol.right_shock_speed)):
        if getattr(sol, f"{wave}_wave") != "shock":
            continue
        s = speed_fn()
        a, b = sample(sol, s - eps), sample(sol, s + eps)
        res = _fluxes(a, s, g) - _fluxes(b, s, g)
        assert np.max(np.abs(res)) < 1e-10


@pytest.mark.parametrize("sol", PROBLEMS, ids=lambda s: f"p{s.p_star:.3f}")
def test_riemann_invariants_through_fans(sol):
    g = sol.gamma
    fans = []
    if sol.left_wave == "rarefaction":
        fans.append(("left", *sol.left_fan()))
    if sol.right_wave == "rarefaction":
        tail, head = sol.right_fan()
        fans.append(("right", tail, head))
    for side, lo, hi in fans:
        sign = 1.0 if side == "left" else -1.0
        values = []
        for xi in np.linspace(lo, hi, 50):
            s = sample(sol, xi)
            a = math.sqrt(g * s.p / s.rho)
            values.append((s.u + sign * 2 * a / (g - 1), s.p / s.rho ** g))
        values = np.array(values)
        assert np.ptp(values[:, 0]) < 1e-10
        assert np.ptp(values[:, 1]) < 1e-10


@pytest.mark.parametrize("sol", PROBLEMS, ids=lambda s: f"p{s.p_star:.3f}")
def test_contact_continuity(sol):
    a = sample(sol, sol.u_star - 1e-12)
    b = sample(sol, sol.u_star + 1e-12)
    assert abs(a.p - b.p) < 1e-10
    assert abs(a.u - b.u) < 1e-10
    assert a.rho != b.rho or sol.left == sol.right


def test_rejects_bad_gamma():
    with pytest.raises(ValueError):
        solve_star(*TUBE, 1.0)
