import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from stationary_spde.covariance import CovarianceError, CovarianceGrid, matern_covariance
from stationary_spde.densities import Atom, SpectralDensity, matern_density, white_density, zero_density
from stationary_spde.models import build_model, solution_spectral_density
from stationary_spde.simulate import (
    GridSpec,
    NoSolutionError,
    SimulationError,
    SingularityError,
    compare,
    empirical_covariance,
    frequency_weights,
    grid_variance,
    periodogram,
    simulate,
    simulate_model,
    truncation_bound,
)

MATERN = matern_density(2, 1.0, 2.0)
GRID = GridSpec((64, 64), (0.25, 0.25))


def test_grid_validation():
    with pytest.raises(SimulationError):
        GridSpec((1, 4), (1.0, 1.0))
    with pytest.raises(SimulationError):
        GridSpec((4, 4), (1.0, 0.0))
    with pytest.raises(SimulationError):
        GridSpec((4,), (1.0, 1.0))


def test_frequency_axes_cover_the_nyquist_box():
    g = GridSpec((8, 4), (0.5, 2.0))
    ax = g.frequency_axes()
    assert_allclose(ax[0].min(), -math.pi / 0.5)
    assert ax[0].max() < math.pi / 0.5
    assert_allclose(g.frequency_cell(), (2 * math.pi / 4.0) * (2 * math.pi / 8.0))


def test_zero_density_gives_zero_field():
    (r,) = simulate(zero_density(2), GridSpec((16, 16), (1.0, 1.0)), seed=3)
    assert_array_equal(r.values, 0.0)


def test_white_noise_variance_matches_box_mass():
    spacing = 0.5
    g = GridSpec((256, 256), (spacing, spacing))
    # unitary factor x white level x box volume = spacing^-d
    mass = grid_variance(white_density(2), g)
    assert_allclose(mass, spacing ** -2, rtol=1e-12)
    reals = simulate(white_density(2), g, seed=11, n_realizations=100)
    var = np.mean([np.mean(r.values ** 2) for r in reals])
    assert abs(var / mass - 1) < 0.05


def test_grid_variance_approaches_closed_form_within_truncation_bound():
    var = grid_variance(MATERN, GRID)
    exact = float(matern_covariance(0.0, 2, 1.0, 2.0))
    bound = truncation_bound(MATERN, GRID)
    assert 0 < exact - var
    # the box also loses the corners outside the ball only partially; the Riemann error is tiny here
    assert exact - var < bound + 1e-4 * exact


def test_aliasing_guard():
    dens = matern_density(2, 1.0, 2.5)
    coarse = GridSpec((32, 32), (0.5, 0.5))
    fine = GridSpec((64, 64), (0.25, 0.25))
    bound = truncation_bound(dens, coarse)
    assert abs(grid_variance(dens, fine) - grid_variance(dens, coarse)) < bound
    emp = []
    for grid in (coarse, fine):
        reals = simulate(dens, grid, seed=5, n_realizations=200)
        emp.append(empirical_covariance(reals, (0, 0)))
    diff = abs(emp[1].values.item() - emp[0].values.item())
    se = math.hypot(emp[0].stderr.item(), emp[1].stderr.item())
    assert diff < bound + 3 * se


def test_lag_zero_within_three_standard_errors():
    reals = simulate(MATERN, GRID, seed=0, n_realizations=200)
    emp = empirical_covariance(reals, (8, 8))
    c = emp.center_index
    exact = float(matern_covariance(0.0, 2, 1.0, 2.0))
    assert emp.provenance == "empirical"
    assert abs(emp.values[c] - exact) < 3 * emp.stderr[c]


def test_estimator_is_exactly_symmetric_in_lag():
    reals = simulate(MATERN, GridSpec((32, 24), (0.25, 0.25)), seed=2, n_realizations=3)
    emp = empirical_covariance(reals, (5, 4))
    assert_array_equal(emp.values, np.flip(emp.values))
    assert_array_equal(emp.stderr, np.flip(emp.stderr))


def test_estimator_on_zero_fields():
    reals = simulate(zero_density(1), GridSpec((32,), (1.0,)), n_realizations=4)
    emp = empirical_covariance(reals, (5,))
    assert_array_equal(emp.values, 0.0)


def test_estimator_guards():
    reals = simulate(MATERN, GridSpec((16, 16), (0.25, 0.25)), n_realizations=2)
    with pytest.raises(SimulationError):
        empirical_covariance(reals, (8, 2))
    with pytest.raises(SimulationError):
        empirical_covariance(reals[:1], (2, 2))
    single = empirical_covariance(reals[:1], (2, 2), ergodic=True)
    assert single.stderr is None


def test_pair_average_excludes_wraparound():
    # a single deterministic field with a known in-grid lag product
    from stationary_spde.simulate import Realization

    g = GridSpec((4,), (1.0,))
    x = np.array([1.0, 2.0, 3.0, 4.0])
    emp = empirical_covariance([Realization(g, x, 0, 0)], (1,), ergodic=True)
    assert_allclose(emp.values, [(2 + 6 + 12) / 3, 30 / 4, (2 + 6 + 12) / 3])


def test_reproducible_and_worker_invariant():
    a = simulate(MATERN, GRID, seed=7, n_realizations=6)
    b = simulate(MATERN, GRID, seed=7, n_realizations=6, workers=4)
    for x, y in zip(a, b):
        assert_array_equal(x.values, y.values)
    c = simulate(MATERN, GRID, seed=8, n_realizations=1)
    assert not np.array_equal(a[0].values, c[0].values)
    # realization i does not depend on how many are drawn
    assert_array_equal(simulate(MATERN, GRID, seed=7, n_realizations=3)[2].values, a[2].values)


def test_realizations_are_real_and_finite():
    hermitian = frequency_weights(MATERN, GRID)
    from stationary_spde.simulate import _mirror

    assert_array_equal(hermitian, _mirror(hermitian))
    for r in simulate(MATERN, GRID, seed=1, n_realizations=3):
        assert r.values.dtype == np.float64 and np.all(np.isfinite(r.values))


def test_periodogram_tracks_density():
    reals = simulate(MATERN, GRID, seed=1, n_realizations=400)
    axes, per = periodogram(reals)
    xi = np.stack(np.meshgrid(*axes, indexing="ij"), -1)
    rel = np.abs(per / MATERN(xi) - 1)
    assert np.median(rel) < 0.1


def test_origin_singularity_is_zeroed():
    m = build_model("matern_no_range", 2, {"alpha": 0.5})
    dens = solution_spectral_density(m, force=True)
    w = frequency_weights(dens, GridSpec((16, 16), (0.5, 0.5)))
    assert w[0, 0] == 0.0 and np.all(np.isfinite(w))


def test_unmasked_singular_cell_raises():
    def spike(xi, om):
        r = np.linalg.norm(xi - np.array([math.pi / 2, 0.0]), axis=-1)
        with np.errstate(divide="ignore"):
            return 1.0 / r

    dens = SpectralDensity(spike, 2, name="spike")
    with pytest.raises(SingularityError):
        simulate(dens, GridSpec((8, 8), (0.5, 0.5)))


def test_nonexistent_model_is_refused():
    with pytest.raises(NoSolutionError):
        simulate_model(build_model("heat", 2, {"a": 1.0}), GridSpec((8, 8, 8), (1.0, 1.0, 1.0)))


def test_atoms_add_a_random_cosine():
    loc = (math.pi / 2, 0.0)
    dens = SpectralDensity(lambda xi, om: np.zeros(xi.shape[:-1]), 2, is_zero=True,
                           atoms=(Atom(loc, 0.5), Atom((-loc[0], 0.0), 0.5)))
    g = GridSpec((8, 8), (1.0, 1.0))
    reals = simulate(dens, g, seed=0, n_realizations=2000)
    x = np.stack([r.values for r in reals])
    # covariance of a random cosine with total weight 1: (2 pi)^(-1) cos(h . loc)
    c1 = np.mean(x[:, 0, 0] * x[:, 1, 0])
    c0 = np.mean(x[:, 0, 0] ** 2)
    assert abs(c0 - 1 / (2 * math.pi)) < 0.1 / (2 * math.pi)
    assert abs(c1) < 0.1 / (2 * math.pi)
    # along the second axis the cosine does not vary
    assert_allclose(x[:, 0, 0], x[:, 0, 3], rtol=1e-12)


def test_waving_matern_zero_time_margin():
    m = build_model("waving_matern", 2, {"c": 1.0, "kappa": 1.0, "alpha": 2.0})
    reals = simulate_model(m, GridSpec((32, 32, 16), (0.25, 0.25, 0.25)), seed=4, n_realizations=100)
    emp = empirical_covariance(reals, (4, 4, 2))
    pts = emp.lag_points()
    sl = (slice(None), slice(None), 2)
    h = np.linalg.norm(pts[sl][..., :2], axis=-1)
    z = (emp.values[sl] - matern_covariance(h, 2, 1.0, 2.0)) / emp.stderr[sl]
    assert np.abs(z).max() < 5


def test_compare_identities():
    g = CovarianceGrid([np.arange(-2.0, 3.0)], np.array([0.1, 0.5, 1.0, 0.5, 0.1]), "closed_form")
    zero = compare(g, g)
    assert (zero.max_abs, zero.max_rel_on_valid, zero.rmse) == (0.0, 0.0, 0.0)
    eps = 1e-3
    shifted = CovarianceGrid(g.axes, g.values + eps, "closed_form")
    rep = compare(shifted, g)
    assert_allclose([rep.max_abs, rep.rmse], [eps, eps], rtol=1e-9)
    assert_allclose(rep.max_rel_on_valid, eps / 0.1, rtol=1e-9)


def test_compare_restricts_to_joint_validity():
    axes = [np.arange(-1.0, 2.0)]
    a = CovarianceGrid(axes, [5.0, 1.0, 5.0], "empirical")
    b = CovarianceGrid(axes, [0.0, 1.0, 0.0], "closed_form", np.array([False, True, False]))
    assert compare(a, b).max_abs == 0.0
    none = CovarianceGrid(axes, [0.0, 1.0, 0.0], "closed_form", np.zeros(3, bool))
    with pytest.raises(CovarianceError):
        compare(a, none)
    with pytest.raises(CovarianceError):
        compare(a, CovarianceGrid([np.arange(4.0)], np.zeros(4), "closed_form"))
