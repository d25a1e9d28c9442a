import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lbm33.equilibrium import (
    MacroState,
    equilibrium,
    equilibrium_field,
    expansion,
    hermite_term,
    macro_fields,
    moments,
)
from lbm33.errors import NonPositiveDensity

from oracles import hermite_rational

finite = dict(allow_nan=False, allow_infinity=False)


def states():
    """rho in [0.1, 10], |u| <= 0.5, theta in [0.6, 1.4]."""
    return st.tuples(
        st.floats(0.1, 10.0, **finite),
        st.floats(0.0, 0.5, **finite),
        st.floats(0.0, 2 * np.pi, **finite),
        st.floats(0.6, 1.4, **finite),
    ).map(lambda t: MacroState(t[0], (t[1] * np.cos(t[2]), t[1] * np.sin(t[2])), t[3]))


def test_zeroth_term_is_one():
    assert hermite_term(0, (0.3, -0.1), 1.7, (2.0, 1.0)) == 1.0


def test_second_term_vanishes_at_rest():
    for v in [(0.0, 0.0), (0.8, 0.0), (1.6, 3.2)]:
        assert hermite_term(2, (0.0, 0.0), 1.0, v) == 0.0


def test_fourth_term_example():
    args = ((0.1, 0.0), 1.2, (0.819381, 0.0))
    want = float(hermite_rational(4, *args))
    assert hermite_term(4, *args) == pytest.approx(want, abs=1e-13)


@settings(max_examples=100)
@given(
    st.integers(0, 4),
    st.floats(-0.5, 0.5, **finite), st.floats(-0.5, 0.5, **finite),
    st.floats(0.5, 1.5, **finite),
    st.integers(-4, 4), st.integers(-4, 4),
)
def test_hermite_terms_against_rationals(n, ux, uy, theta, nx, ny):
    v = (0.8193806236079012 * nx, 0.8193806236079012 * ny)
    want = float(hermite_rational(n, (ux, uy), theta, v))
    assert abs(hermite_term(n, (ux, uy), theta, v) - want) <= 1e-13 * max(1.0, abs(want))


@settings(max_examples=100)
@given(states(), st.integers(-4, 4), st.integers(-4, 4))
def test_compiled_expansion_matches_terms(state, nx, ny):
    v = (0.8193806236079012 * nx, 0.8193806236079012 * ny)
    series = sum(hermite_term(n, state.u, state.theta, v) / f for n, f in enumerate((1, 1, 2, 6, 24)))
    got = expansion(state.u[0], state.u[1], state.theta, v[0], v[1])
    assert got == pytest.approx(series, rel=1e-12, abs=1e-12)


def test_reference_state_gives_weights(any_lattice):
    f = equilibrium(any_lattice, MacroState(1.0, (0.0, 0.0), 1.0))
    assert np.array_equal(f, any_lattice.weights)
    assert np.array_equal(equilibrium(any_lattice, MacroState(2.0)), 2.0 * any_lattice.weights)


@settings(max_examples=200)
@given(states(), st.sampled_from([0.5, 2.0, 3.0, 0.25]))
def test_linear_in_density(any_lattice, state, lam):
    scaled = MacroState(state.rho * lam, state.u, state.theta)
    # lam is a power of two or 3: the check is exact for powers of two
    got = equilibrium(any_lattice, scaled)
    want = lam * equilibrium(any_lattice, state)
    if lam in (0.5, 2.0, 0.25):
        assert np.array_equal(got, want)
    else:
        assert np.allclose(got, want, rtol=1e-15, atol=1e-16)


def test_mass_is_density(d2v33):
    s = MacroState(1.3, (0.2, -0.1), 0.8)
    assert abs(equilibrium(d2v33, s).sum() - 1.3) < 1e-12


def test_moment_example(d2v33):
    s = MacroState(1.0, (0.05, -0.02), 1.1)
    back = moments(d2v33, equilibrium(d2v33, s))
    assert back.rho == pytest.approx(1.0, abs=1e-12)
    assert back.u == pytest.approx((0.05, -0.02), abs=1e-12)
    assert back.theta == pytest.approx(1.1, abs=1e-12)


def test_moments_examples(d2v33):
    ref = moments(d2v33, d2v33.weights)
    assert ref.rho == pytest.approx(1.0, abs=1e-14)
    assert ref.u == pytest.approx((0.0, 0.0), abs=1e-15)
    assert ref.theta == pytest.approx(1.0, abs=1e-14)

    s = MacroState(1.5, (0.1, 0.1), 0.9)
    back = moments(d2v33, equilibrium(d2v33, s))
    assert (back.rho, *back.u, back.theta) == pytest.approx((1.5, 0.1, 0.1, 0.9), abs=1e-12)

    single = np.zeros(d2v33.q)
    single[d2v33.index_of((0, 0))] = 1.0
    rest = moments(d2v33, single)
    assert (rest.rho, *rest.u, rest.theta) == (1.0, 0.0, 0.0, 0.0)


def test_moments_rejects_empty(d2v33):
    with pytest.raises(NonPositiveDensity):
        moments(d2v33, np.zeros(d2v33.q))


@settings(max_examples=1000, deadline=None)
@given(states())
def test_round_trip_property(any_lattice, state):
    back = moments(any_lattice, equilibrium(any_lattice, state))
    assert abs(back.rho - state.rho) <= 1e-11
    assert abs(back.u[0] - state.u[0]) <= 1e-11
    assert abs(back.u[1] - state.u[1]) <= 1e-11
    assert abs(back.theta - state.theta) <= 1e-11


@pytest.mark.parametrize("transform", [
    lambda v: (v[0], -v[1]),
    lambda v: (-v[0], v[1]),
    lambda v: (v[1], v[0]),
])
@settings(max_examples=50)
@given(state=states())
def test_reflection_equivariance(d2v33, transform, state):
    perm = d2v33.permutation(transform)
    mirrored = MacroState(state.rho, transform(state.u), state.theta)
    f = equilibrium(d2v33, state)
    g = equilibrium(d2v33, mirrored)
    # direction i of the mirrored state sees what direction perm^-1(i) saw before
    assert np.allclose(g[perm], f, rtol=0, atol=1e-14 * max(1.0, state.rho))


def test_field_versions_agree(d2v33):
    rng = np.random.default_rng(3)
    rho = rng.uniform(0.5, 2.0, (5, 4))
    ux = rng.uniform(-0.2, 0.2, (5, 4))
    uy = rng.uniform(-0.2, 0.2, (5, 4))
    th = rng.uniform(0.8, 1.2, (5, 4))
    f = equilibrium_field(d2v33, rho, ux, uy, th)
    assert f.shape == (33, 5, 4)
    for x, y in [(0, 0), (4, 3), (2, 1)]:
        s = MacroState(rho[x, y], (ux[x, y], uy[x, y]), th[x, y])
        assert np.allclose(f[:, x, y], equilibrium(d2v33, s), rtol=0, atol=1e-15)
    m = macro_fields(d2v33, f)
    assert np.allclose(m.rho, rho, atol=1e-12)
    assert np.allclose(m.theta, th, atol=1e-12)
