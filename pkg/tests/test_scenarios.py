from dataclasses import replace

import numpy as np
import pytest

from lbm33.errors import ConfigError, GridFileError
from lbm33.fileio import GridData, read_grid, write_grid
from lbm33.scenarios import (
    GridFileInit,
    ScenarioConfig,
    ShockTubeInit,
    StripInit,
    BoundaryChoice,
    initialize,
    iterate,
    plateau_report,
    relative_l2_physical,
    resolve_grid_path,
    riemann_solution,
    run,
    strip_index,
    wave_node,
)

SMALL = ScenarioConfig(nx=200, ny=4, steps=40, output_times=(0.0, 0.5, 1.0))
PERIODIC_XY = BoundaryChoice("periodic", "periodic", "periodic", "periodic")


def test_default_config():
    cfg = ScenarioConfig().validate()
    assert (cfg.nx, cfg.ny, cfg.omega, cfg.lattice_name) == (1000, 8, 1.0, "d2v33")
    assert cfg.output_steps() == [50, 150, 250]


@pytest.mark.parametrize("change", [
    dict(omega=2.5), dict(omega=0.0), dict(steps=-1), dict(lattice_name="d2q9"),
    dict(output_times=(0.6, 0.2)), dict(output_times=(1.5,)), dict(gamma=1.0),
    dict(initial=StripInit(strips=1)),
    dict(boundaries=BoundaryChoice(left="periodic")),
    dict(initial=GridFileInit("x.grid")),
])
def test_invalid_configs(change):
    with pytest.raises(ConfigError):
        replace(SMALL, **change).validate()


def test_shock_tube_initial_mass(d2v33):
    cfg = ScenarioConfig()
    mix, _ = initialize(cfg, d2v33)
    assert mix.names == ("A",)
    assert mix.total().sum() == pytest.approx(cfg.ny * (500 * 4.0 + 500 * 1.0), rel=1e-14)
    rho = mix.total().sum(axis=0)
    assert np.all(rho[:500] == pytest.approx(4.0, rel=1e-14))
    assert np.all(rho[500:] == pytest.approx(1.0, rel=1e-14))


def test_uniform_tube_is_fixed_point(d2v33):
    cfg = replace(SMALL, initial=ShockTubeInit(2.0, 2.0, 0.8), steps=20)
    start = None
    for k, mix in iterate(cfg, d2v33):
        if k == 0:
            start = mix.data.copy()
    assert np.max(np.abs(mix.data - start)) < 1e-13


def test_strip_layout(d2v33):
    idx = strip_index(1000, 10)
    assert np.all(np.bincount(idx) == 100)
    cfg = replace(ScenarioConfig(), initial=StripInit())
    mix, bcs = initialize(cfg, d2v33)
    rho = mix.data.sum(axis=1)[:, :, 0]
    owner_a = rho[0] > 0
    assert owner_a.sum() == 500 and (rho[1] > 0).sum() == 500
    assert np.all(owner_a ^ (rho[1] > 0))
    starts = np.flatnonzero(np.diff(owner_a.astype(int))) + 1
    assert list(starts) == list(range(100, 1000, 100))
    assert bcs.left.fractions == (1.0, 0.0) and bcs.right.fractions == (0.0, 1.0)


def test_strip_sum_equals_single(d2v33):
    single, _ = initialize(ScenarioConfig(), d2v33)
    mix, _ = initialize(replace(ScenarioConfig(), initial=StripInit()), d2v33)
    assert np.array_equal(mix.total(), single.total())


def test_two_strips_split_at_diaphragm(d2v33):
    cfg = replace(SMALL, initial=StripInit(strips=2))
    mix, _ = initialize(cfg, d2v33)
    rho = mix.data.sum(axis=1)[:, :, 0]
    assert np.all(rho[0, :100] == pytest.approx(4.0)) and np.all(rho[0, 100:] == 0)
    assert np.all(rho[1, 100:] == pytest.approx(1.0)) and np.all(rho[1, :100] == 0)


def test_run_zero_steps(d2v33):
    recs = run(replace(SMALL, steps=0), d2v33)
    assert [r.step for r in recs] == [0]
    prof = recs[0].profile
    assert np.array_equal(prof["rho_riemann"], np.where(np.arange(200) < 100, 4.0, 1.0))
    assert np.allclose(prof["rho_total"], prof["rho_riemann"], rtol=1e-14)


def test_run_records_and_y_average(d2v33):
    rows = {}

    def grab(k, mix):
        if k == SMALL.steps:
            rows["rho"] = mix.total().sum(axis=0)

    recs = run(SMALL, d2v33, on_step=grab)
    assert [r.step for r in recs] == [0, 20, 40]
    assert [r.t_rel for r in recs] == [0.0, 0.5, 1.0]
    final = recs[-1].profile
    for y in range(SMALL.ny):
        assert np.max(np.abs(rows["rho"][:, y] - final["rho_total"])) < 1e-12
    assert np.all(final["rho_B"] == 0)
    assert np.allclose(final["p"], final["rho_total"] * final["theta"], rtol=1e-12)


def test_strip_profile_matches_single(d2v33):
    single = run(SMALL, d2v33)
    strips = run(replace(SMALL, initial=StripInit(strips=4)), d2v33)
    for a, b in zip(single, strips):
        assert np.max(np.abs(a.profile["rho_total"] - b.profile["rho_total"])) < 1e-12
        assert np.max(np.abs(b.profile["rho_A"] + b.profile["rho_B"] - b.profile["rho_total"])) < 1e-12
        assert np.array_equal(a.profile["rho_riemann"], b.profile["rho_riemann"])


def _grid_config(tmp_path, grid):
    path = write_grid(grid, tmp_path / "g.grid")
    nx, ny = grid.shape
    return ScenarioConfig(nx=nx, ny=ny, steps=15, output_times=(0.0, 1.0),
                          initial=GridFileInit(str(path)), boundaries=PERIODIC_XY)


def test_grid_single_component_file(tmp_path, d2v33):
    """rho_B = 0 everywhere: the mixture behaves as a single component."""
    rng = np.random.default_rng(3)
    nx, ny = 24, 20
    rho = 1.0 + 0.1 * rng.random((nx, ny))
    z = np.zeros((nx, ny))
    cfg = _grid_config(tmp_path, GridData(rho, z, z, z.copy(), np.ones((nx, ny)), ncomp=2))
    recs = run(cfg, d2v33)
    mix, _ = initialize(cfg, d2v33)
    assert np.all(mix.data[1] == 0)
    assert np.all(recs[-1].profile["rho_B"] == 0)
    # same run with a one-component grid
    cfg1 = _grid_config(tmp_path, GridData(rho, z, z, z.copy(), np.ones((nx, ny)), ncomp=1))
    recs1 = run(cfg1, d2v33)
    assert np.array_equal(recs[-1].profile["rho_total"], recs1[-1].profile["rho_total"])


def test_grid_checkerboard_total_invariant(tmp_path, d2v33):
    """Alternating A/B nodes at equal pressure: total density must not move."""
    nx, ny = 16, 16
    board = (np.add.outer(np.arange(nx), np.arange(ny)) % 2).astype(float)
    z = np.zeros((nx, ny))
    cfg = _grid_config(tmp_path, GridData(1.3 * board, 1.3 * (1 - board), z, z.copy(), np.ones((nx, ny))))
    recs = run(cfg, d2v33)
    assert np.max(np.abs(recs[-1].profile["rho_total"] - 1.3)) < 1e-12


def test_grid_shape_mismatch(tmp_path, d2v33):
    z = np.zeros((8, 6))
    cfg = _grid_config(tmp_path, GridData(z + 1, z, z, z, z + 1))
    with pytest.raises(GridFileError):
        initialize(replace(cfg, nx=9), d2v33)


def test_bundled_grid():
    grid = read_grid(resolve_grid_path(GridFileInit().path))
    assert grid.shape == (200, 200) and grid.ncomp == 2
    grid.validate()
    assert (grid.rho_a > 0).any() and (grid.rho_b > 0).any()


def test_wave_nodes_of_default_tube():
    cfg = ScenarioConfig()
    sol = riemann_solution(cfg)
    c = 0.8193806236079012
    shock = wave_node(sol.right_shock_speed(), cfg.steps, c, cfg.nx)
    head = wave_node(sol.left_fan()[0], cfg.steps, c, cfg.nx)
    # both waves stay inside the tube at the final time
    assert 0 < head < 500 < shock < cfg.nx
    assert shock == pytest.approx(500 + 1.8240 * 250 / (2 ** 0.5 * c), rel=1e-3)


def test_plateau_report_on_oracle_profile():
    cfg = ScenarioConfig()
    from lbm33.scenarios import riemann_density
    sol = riemann_solution(cfg)
    rho = riemann_density(sol, cfg.steps, 0.8, cfg.nx)
    rep = plateau_report(rho, cfg, cfg.steps, 0.8)
    assert rep.max_error < 1e-14 and rep.monotone and rep.rebound == 0.0


def test_relative_l2_physical_identity():
    rho = np.linspace(2, 1, 100)
    assert relative_l2_physical(rho, 0.9, rho, 0.9, 100, 100) == 0.0
