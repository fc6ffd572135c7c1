import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from stationary_spde.analysis import (
    AnalysisError,
    check_existence,
    check_uniqueness,
    homogeneous_spectral,
    i_beta,
    i_beta_closed_form,
    i_beta_trapezoid,
    soem_trace,
    trace_analysis,
)
from stationary_spde.covariance import LagPoint, model_covariance
from stationary_spde.densities import matern_density, white_density
from stationary_spde.models import build_model, matern_symbol, solution_spectral_density
from stationary_spde.symbols import constant_symbol, sample_frequencies


def _verdict(name, d, params, **kw):
    return check_existence(build_model(name, d, params), **kw)


def test_heat_existence_by_dimension():
    assert _verdict("heat", 2, {"a": 1.0}).exists is False
    rep = _verdict("heat", 3, {"a": 1.0})
    assert rep.exists is True and rep.finite is False


def test_wave_has_no_solution():
    assert _verdict("wave", 2, {"c": 1.0}).exists is False


def test_no_range_existence():
    assert _verdict("matern_no_range", 3, {"alpha": 1.0}).exists is True
    assert _verdict("matern_no_range", 3, {"alpha": 2.0}).exists is False


def test_matern_finite_iff_alpha_above_half_dimension():
    assert _verdict("matern", 2, {"kappa": 1.0, "alpha": 1.2}).finite
    rep = _verdict("matern", 2, {"kappa": 1.0, "alpha": 0.8})
    assert rep.exists and rep.unique and not rep.finite and rep.N == 1


@pytest.mark.parametrize("name,d,params", [
    ("matern", 2, {"kappa": 1.0, "alpha": 2.0}),
    ("markov", 3, {"coefficients": [2.0, 0.0, 1.0]}),
    ("stein", 2, dict(a=1, b=1, s=1, kappa=1, alpha=1, beta=1, nu=1.4)),
    ("evolving_matern", 2, dict(beta=2.0, a=1.0, kappa=1.0, alpha=3.0)),
])
def test_forced_quadrature_agrees_with_short_circuit(name, d, params):
    fast = _verdict(name, d, params)
    slow = _verdict(name, d, params, force_quadrature=True)
    assert (fast.exists, fast.N, fast.finite) == (slow.exists, slow.N, slow.finite)


def test_finite_implies_exists():
    for name, d, p in [("matern", 1, {"kappa": 1.0, "alpha": 1.0}), ("heat", 4, {"a": 1.0})]:
        rep = _verdict(name, d, p)
        assert not rep.finite or rep.exists


def test_report_serializes():
    rep = _verdict("heat", 2, {"a": 1.0}).to_dict()
    assert rep["exists"] is False and rep["function_valued"] is False and rep["verdict"] == "no_solution"


def test_uniqueness():
    assert check_uniqueness(build_model("matern", 2, {"kappa": 1.0, "alpha": 2.0})).unique is True
    frac = check_uniqueness(build_model("matern_no_range", 2, {"alpha": 0.5}))
    assert frac.unique is False and frac.zero_set["kind"] == "origin"
    wave = check_uniqueness(build_model("wave", 2, {"c": 3.0}))
    assert wave.unique is False and wave.zero_set == {"kind": "cone", "speed": 3.0}


def test_homogeneous_random_constant():
    m = build_model("matern_no_range", 2, {"alpha": 0.5})
    dens = homogeneous_spectral(m, weight=(2 * math.pi) ** (2 / 2))
    (atom,) = dens.atoms
    assert atom.is_origin
    assert_allclose((2 * math.pi) ** -1 * atom.weight, 1.0, rtol=1e-15)


def test_homogeneous_cone_reproduces_base_at_zero_lag():
    m = build_model("wave", 3, {"c": 1.0})
    base = matern_density(3, 1.0, 2.0)
    dens = homogeneous_spectral(m, base)
    assert dens.cone.speed == 1.0
    from stationary_spde.covariance import _cone_covariance, matern_covariance

    for h in (0.3, 1.0, 2.5):
        assert_allclose(_cone_covariance(dens.cone, 3, LagPoint(np.array([h, 0, 0]), 0.0)),
                        matern_covariance(h, 3, 1.0, 2.0), rtol=1e-9)


def test_homogeneous_trivial_rejected():
    with pytest.raises(AnalysisError):
        homogeneous_spectral(build_model("matern", 2, {"kappa": 1.0, "alpha": 2.0}))


# ---------------------------------------------------------------- I_beta

def test_i_beta_one_and_two():
    assert abs(i_beta(1.0) - math.pi / 2) <= 1e-10
    assert abs(i_beta(2.0) - math.pi / 2) <= 1e-10


@pytest.mark.parametrize("beta", [0.75, 1.5, 3.0])
def test_i_beta_two_schemes(beta):
    assert abs(i_beta(beta) - i_beta_trapezoid(beta)) <= 1e-8


def test_i_beta_three_halves_positive_sign():
    assert abs(i_beta(1.5, 1.0) - i_beta_trapezoid(1.5, 1.0)) <= 1e-8


@pytest.mark.parametrize("beta,sign", [(0.75, 1.0), (0.75, -1.0), (1.5, -1.0), (2.5, 1.0), (3.0, 1.0)])
def test_i_beta_against_table_formula(beta, sign):
    assert_allclose(i_beta(beta, sign), i_beta_closed_form(beta, sign), rtol=1e-11)


def test_i_beta_domain():
    with pytest.raises(AnalysisError):
        i_beta(0.5)
    with pytest.raises(AnalysisError):
        i_beta(2.0, 1.0)  # double root at theta = 1


# ---------------------------------------------------------------- traces

def _omega_marginal(dens, x):
    f = lambda w: float(dens(x[None, :], np.array([w]))[0])
    v, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-13, limit=500)
    return 2 * v / math.sqrt(2 * math.pi)


@pytest.mark.parametrize("beta", [1.0, 1.5, 3.0])
def test_trace_density_matches_omega_integration(beta):
    m = build_model("evolving_matern", 2, dict(beta=beta, a=1.3, kappa=0.8, alpha=2.0))
    rep = trace_analysis(beta, m.spatial_symbol, white_density(2))
    assert rep.temporally_integrable and rep.I_beta > 0
    dens = solution_spectral_density(m)
    xi, _ = sample_frequencies(2, 20, 0, spread=1.5)
    for x in xi:
        assert_allclose(rep.trace_density(x[None, :])[0], _omega_marginal(dens, x), rtol=1e-8)


def test_trace_exponent_beta_one():
    a, kappa, alpha = 1.7, 0.9, 3.0
    g = matern_symbol(2, kappa, alpha, scale=a)
    rep = trace_analysis(1.0, g, white_density(2))
    r = np.array([0.0, 1.0, 3.0, 10.0])
    xi = np.stack([r, np.zeros_like(r)], axis=-1)
    assert_allclose(rep.trace_symbol(xi).real, math.sqrt(2 * a) * (kappa ** 2 + r ** 2) ** (alpha / 4), rtol=1e-13)


def test_trace_constant_symbol_stays_white():
    c = 2.5
    rep = trace_analysis(1.0, constant_symbol(c, 2), white_density(2))
    xi, _ = sample_frequencies(2, 50, 2)
    assert_allclose(rep.trace_density(xi), white_density(2)(xi) / (2 * c), rtol=1e-14)


def test_trace_rejects_sign_condition_violation():
    with pytest.raises(AnalysisError):
        trace_analysis(2.0, matern_symbol(2, 1.0, 2.0, sign=1.0), white_density(2))


def test_trace_rejects_complex_symbol():
    m = build_model("advection_diffusion", 2, {"kappa": 1.0, "v": [1.0, 0.0]})
    with pytest.raises(AnalysisError):
        trace_analysis(1.5, m.spatial_symbol, white_density(2))


def test_trace_rejects_beta_half():
    with pytest.raises(AnalysisError):
        trace_analysis(0.5, matern_symbol(2, 1.0, 2.0), white_density(2))


def test_soem_trace_real_negative_symbol():
    g = matern_symbol(3, 1.0, 2.0, sign=-1.0)
    rep = soem_trace(g)
    r = np.array([0.0, 0.5, 2.0])
    xi = np.stack([r, 0 * r, 0 * r], -1)
    gab = (1 + r ** 2)
    assert_allclose(rep.trace_density(xi), (2 * math.pi) ** -1.5 / (4 * gab ** 1.5), rtol=1e-14)


def test_soem_trace_complex_symbol_matches_omega_integration():
    from stationary_spde.symbols import Symbol

    vel = np.array([0.8, -0.3])
    g = Symbol(lambda xi, om: -(1.0 + np.sum(xi * xi, -1)) + 1j * (xi @ vel), 2, name="complex test symbol")
    rep = soem_trace(g)
    from stationary_spde.models import _evolution

    soem = _evolution("soem", 2, {}, 2.0, g, None)
    dens = solution_spectral_density(soem, force=True)
    for x in sample_frequencies(2, 20, 1, spread=1.0)[0]:
        f = lambda w: float(dens(x[None, :], np.array([w]))[0])
        v, _ = integrate.quad(f, -np.inf, np.inf, epsabs=0, epsrel=1e-12, limit=800)
        assert_allclose(rep.trace_density(x[None, :])[0], v / math.sqrt(2 * math.pi), rtol=1e-8)


def test_soem_trace_singular_flagged():
    with pytest.raises(AnalysisError):
        soem_trace(matern_symbol(2, 1.0, 2.0, sign=1.0))


def test_soem_zero_lag_matches_trace_transform():
    m = build_model("evolving_matern", 3, dict(beta=2.0, a=1.0, kappa=1.0, alpha=3.0))
    rep = soem_trace(m.spatial_symbol)
    from stationary_spde.covariance import hankel_transform

    for h in (0.5, 1.5):
        mixture, _ = model_covariance(m, LagPoint(np.array([h, 0.0, 0.0]), 0.0))
        assert_allclose(mixture, hankel_transform(rep.trace_density, 3, [h])[0], rtol=1e-8)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_fubini_consistency():
    m = build_model("evolving_matern", 1, dict(beta=1.5, a=1.0, kappa=1.0, alpha=3.0))
    rep = trace_analysis(1.5, m.spatial_symbol, white_density(1))
    dens = solution_spectral_density(m)
    one = integrate.quad(lambda r: float(rep.trace_density(np.array([[r]]))[0]), -np.inf, np.inf,
                         epsabs=0, epsrel=1e-12)[0]
    two = integrate.dblquad(lambda w, r: float(dens(np.array([[r]]), np.array([w]))[0]),
                            -np.inf, np.inf, -np.inf, np.inf, epsabs=0, epsrel=1e-10)[0]
    assert_allclose(one, two / math.sqrt(2 * math.pi), rtol=1e-6)
