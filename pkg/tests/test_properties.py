import io
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose, assert_array_equal

from stationary_spde.covariance import CovarianceGrid, matern_covariance
from stationary_spde.hankel import radial_transform
from stationary_spde.models import build_model, solution_spectral_density
from stationary_spde.simulate import GridSpec, Realization, compare, empirical_covariance
from stationary_spde.spdg import decode_spdg, encode_spdg, read_csv, write_csv
from stationary_spde.symbols import combine, fractional_time_symbol

FAST = settings(max_examples=40, deadline=None)
finite = st.floats(-1e6, 1e6, allow_nan=False)
vel2 = st.lists(st.floats(-3, 3), min_size=2, max_size=2)


def _points(draw_vals, dim):
    return np.asarray(draw_vals, dtype=float).reshape(-1, dim)


@FAST
@given(vel2, st.lists(finite, min_size=6, max_size=6))
def test_advection_symbol_is_hermitian(v, xs):
    g = build_model("advection_diffusion", 2, {"kappa": 1.0, "v": v}).spatial_symbol
    xi = _points(xs, 2)
    assert_allclose(g(-xi), np.conj(g(xi)), rtol=1e-12, atol=1e-9)


@FAST
@given(vel2, st.lists(st.floats(-20, 20), min_size=4, max_size=4), st.floats(-50, 50))
def test_solution_density_is_even(v, xs, w):
    m = build_model("advection_diffusion", 2, {"kappa": 1.0, "v": v})
    dens = solution_spectral_density(m)
    xi = _points(xs, 2)
    om = np.full(xi.shape[0], w)
    assert_allclose(dens(xi, om), dens(-xi, -om), rtol=1e-12)
    assert np.all(dens(xi, om) >= 0)


@FAST
@given(st.floats(0.1, 5), st.floats(0.6, 4), st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_modulus_squared_of_matern_symbol(kappa, alpha, xs):
    g = build_model("matern", 2, {"kappa": kappa, "alpha": alpha}).symbol
    xi = _points(xs, 2)
    sq = combine("modulus_squared", g)
    assert_allclose(sq(xi).real, np.abs(g(xi)) ** 2, rtol=1e-13)
    assert_array_equal(sq(xi).imag, 0.0)


@FAST
@given(st.floats(0.05, 4.0), st.floats(-100, 100), st.floats(0, 50), st.floats(-50, 50))
def test_uniform_lower_bound_under_sign_condition(beta, omega, mag, g_imag):
    # |(i w)^beta + g| >= |g_R| whenever g_R cos(beta pi / 2) >= 0, for every g_I
    c = math.cos(beta * math.pi / 2)
    g_real = math.copysign(mag, c) if c != 0 else mag
    t = fractional_time_symbol(beta)(np.array([omega]))[0]
    assert abs(t + complex(g_real, g_imag)) >= abs(g_real) * (1 - 1e-12)


@FAST
@given(st.floats(0.05, 4.0), st.floats(-100, 100))
def test_time_factor_is_hermitian(beta, omega):
    f = fractional_time_symbol(beta)
    assert_allclose(f(np.array([-omega])), np.conj(f(np.array([omega]))), rtol=1e-13, atol=1e-300)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([1, 2, 3]), st.floats(0.3, 3.0), st.floats(0.05, 8.0))
def test_matern_transform_scaling_law(d, kappa, h):
    # f_kappa(r) = kappa^(-2 alpha) f_1(r / kappa)  =>  rho_kappa(h) = kappa^(d - 2 alpha) rho_1(kappa h)
    alpha = d / 2 + 1
    f1 = lambda r: (2 * math.pi) ** (-d / 2) * (1 + r * r) ** (-alpha)
    fk = lambda r: (2 * math.pi) ** (-d / 2) * (kappa ** 2 + r * r) ** (-alpha)
    assert_allclose(radial_transform(fk, d, h), kappa ** (d - 2 * alpha) * radial_transform(f1, d, kappa * h),
                    rtol=1e-9)


@FAST
@given(st.floats(0.1, 5), st.floats(1.05, 4), st.lists(st.floats(0, 30), min_size=2, max_size=10))
def test_matern_covariance_bounded_by_variance(kappa, alpha, hs):
    var = matern_covariance(0.0, 2, kappa, alpha)
    vals = matern_covariance(np.array(hs), 2, kappa, alpha)
    assert np.all(vals <= var * (1 + 1e-12)) and np.all(vals >= 0)


@FAST
@given(arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 4)), elements=st.floats(allow_nan=True)),
       st.lists(st.floats(1e-6, 1e6), min_size=2, max_size=2))
def test_spdg_round_trip(values, spacings):
    g = decode_spdg(encode_spdg(values, spacings))
    assert g.values.tobytes() == values.tobytes()
    assert g.spacings == tuple(spacings)


@FAST
@given(arrays(np.float64, st.integers(1, 6), elements=st.floats(-1e300, 1e300)))
def test_csv_round_trip(values):
    axes = [np.arange(values.size) * 0.1]
    buf = io.StringIO()
    write_csv(buf, axes, values)
    _, back, valid, _ = read_csv(buf.getvalue())
    assert back.tobytes() == values.tobytes() and valid.all()


@FAST
@given(arrays(np.float64, st.tuples(st.integers(6, 10), st.integers(6, 10)), elements=st.floats(-10, 10)),
       arrays(np.float64, st.tuples(st.integers(6, 10), st.integers(6, 10)), elements=st.floats(-10, 10)))
def test_empirical_estimator_is_lag_symmetric(a, b):
    g = GridSpec(a.shape, (1.0, 1.0))
    b = np.resize(b, a.shape)
    emp = empirical_covariance([Realization(g, a, 0, 0), Realization(g, b, 0, 1)], (2, 2))
    assert_array_equal(emp.values, np.flip(emp.values))


@FAST
@given(arrays(np.float64, 7, elements=st.floats(-5, 5)), st.floats(1e-6, 1.0))
def test_compare_constant_shift(values, eps):
    axes = [np.arange(-3.0, 4.0)]
    a = CovarianceGrid(axes, values, "closed_form")
    b = CovarianceGrid(axes, values + eps, "closed_form")
    rep = compare(b, a)
    assert_allclose(rep.max_abs, eps, rtol=1e-6, atol=1e-12)
    assert compare(a, a).rmse == 0.0
