"""Tests for the scalar special-function layer: gamma, Bessel J, quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jv

from fracheat.specfun import (
    IntegralResult,
    QuadratureConfig,
    QuadratureError,
    bessel_j,
    check_bessel_recurrence,
    gamma,
    integrate_semi_infinite,
)


# ---------------------------------------------------------------------------
# gamma


@pytest.mark.parametrize(
    "x, expected",
    [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (5.0, 24.0), (2.0, 1.0), (4.0, 6.0)],
)
def test_gamma_known_values(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -7.0])
def test_gamma_rejects_poles(x):
    with pytest.raises(ValueError):
        gamma(x)


def test_gamma_negative_noninteger_ok():
    # reflection territory; -1.5 sits between the poles at -1 and -2
    assert gamma(-1.5) == pytest.approx(4.0 * math.sqrt(math.pi) / 3.0, rel=1e-13)


@given(st.floats(min_value=0.1, max_value=40.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_gamma_functional_equation(x):
    assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


# ---------------------------------------------------------------------------
# bessel_j


def test_bessel_at_zero():
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(1.0, 0.0) == 0.0
    assert bessel_j(2.5, 0.0) == 0.0
    assert bessel_j(-0.5, 0.0) == math.inf


def test_bessel_rejects_bad_order():
    with pytest.raises(ValueError):
        bessel_j(-0.75, 1.0)


def test_bessel_rejects_negative_argument():
    with pytest.raises(ValueError):
        bessel_j(0.0, -1.0)


@pytest.mark.parametrize("z", [0.1, 1.0, math.pi, 7.0, 40.0, 300.0])
def test_bessel_half_integer_closed_forms(z):
    # J_{1/2} and J_{-1/2} reduce to sine and cosine
    amp = math.sqrt(2.0 / (math.pi * z))
    assert bessel_j(0.5, z) == pytest.approx(amp * math.sin(z), abs=1e-12)
    assert bessel_j(-0.5, z) == pytest.approx(amp * math.cos(z), abs=1e-12)


def test_bessel_minus_half_at_pi():
    # closed form gives exactly -sqrt(2)/pi there
    assert bessel_j(-0.5, math.pi) == pytest.approx(-math.sqrt(2.0) / math.pi, rel=1e-12)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 1.0, 1.5, 2.5, 4.0, 6.0])
def test_bessel_matches_scipy(nu):
    zs = np.concatenate(
        [np.linspace(1e-3, 30.0, 157), np.geomspace(30.0, 1e4, 80)]
    )
    ours = np.array([bessel_j(nu, float(z)) for z in zs])
    ref = jv(nu, zs)
    # ten significant digits, with an absolute floor near the zeros of J
    assert np.all(np.abs(ours - ref) <= 1e-10 + 1e-10 * np.abs(ref))


def test_bessel_series_asymptotic_seam():
    # accuracy must not degrade where the evaluation strategy switches
    for nu in (0.0, 0.5, 2.0):
        cutoff = max(12.0, 2.0 * nu)
        for dz in (-1e-9, -1e-3, 1e-3, 1e-9):
            z = cutoff + dz
            assert bessel_j(nu, z) == pytest.approx(float(jv(nu, z)), abs=1e-10)


# ---------------------------------------------------------------------------
# derivative identity self-check


@pytest.mark.parametrize("nu, z", [(0.0, 1.0), (0.5, 2.0), (3.0, 10.0)])
def test_recurrence_residual_small(nu, z):
    assert check_bessel_recurrence(nu, z) <= 1e-8


def test_recurrence_residual_grid():
    orders = [-0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    zs = np.concatenate([[1e-3, 1e-2], np.linspace(0.05, 100.0, 200)])
    for nu in orders:
        for z in zs:
            z = float(z)
            residual = check_bessel_recurrence(nu, z)
            assert residual <= 1e-8 * (1.0 + z * abs(bessel_j(nu, z))), (nu, z)


def test_recurrence_rejects_nonpositive_z():
    with pytest.raises(ValueError):
        check_bessel_recurrence(0.0, 0.0)


# ---------------------------------------------------------------------------
# semi-infinite quadrature


@pytest.fixture
def cfg():
    return QuadratureConfig()


def test_quadrature_exponential(cfg):
    res = integrate_semi_infinite(lambda r: np.exp(-r), cfg, decay_exponent=1.0)
    assert res.value == pytest.approx(1.0, abs=cfg.abs_tol * 10)
    assert res.error_estimate >= abs(res.value - 1.0)


def test_quadrature_gaussian_moment(cfg):
    res = integrate_semi_infinite(
        lambda r: r * np.exp(-(r**2)), cfg, decay_exponent=2.0, poly_power=1.0
    )
    assert res.value == pytest.approx(0.5, abs=cfg.abs_tol * 10)
    assert res.error_estimate >= abs(res.value - 0.5)


def test_quadrature_oscillatory_laplace(cfg):
    # Laplace transform of J_0 at 1: integral of e^{-r} J_0(r) is 1/sqrt(2)
    res = integrate_semi_infinite(
        lambda r: np.exp(-r) * jv(0, r), cfg, decay_exponent=1.0, osc_scale=1.0
    )
    truth = 1.0 / math.sqrt(2.0)
    assert res.value == pytest.approx(truth, abs=cfg.abs_tol * 10)
    assert res.error_estimate >= abs(res.value - truth)


def test_quadrature_fast_oscillation_panels(cfg):
    # frequency high enough to force the panel route; closed form
    # for e^{-r} J_0(w r) is 1/sqrt(1+w^2)
    w = 200.0
    res = integrate_semi_infinite(
        lambda r: np.exp(-r) * jv(0, w * r), cfg, decay_exponent=1.0, osc_scale=w
    )
    truth = 1.0 / math.sqrt(1.0 + w * w)
    assert res.value == pytest.approx(truth, abs=1e-12)
    assert res.evaluations > 1000


def test_quadrature_slow_decay_exponent(cfg):
    # decay e^{-r^0.6} pushes the truncation radius out; value from the
    # substitution u = r^0.6: integral is Gamma(1/0.6)/0.6... via gamma
    res = integrate_semi_infinite(
        lambda r: np.exp(-(r**0.6)), cfg, decay_exponent=0.6
    )
    truth = gamma(1.0 / 0.6) / 0.6
    assert res.value == pytest.approx(truth, rel=1e-9)


def test_quadrature_result_fields(cfg):
    res = integrate_semi_infinite(lambda r: np.exp(-r), cfg, decay_exponent=1.0)
    assert isinstance(res, IntegralResult)
    assert res.evaluations > 0
    assert res.error_estimate >= 0.0


def test_quadrature_budget_exhaustion():
    # three subdivisions cannot resolve 40 oscillations; the failure must
    # carry the best estimate rather than silently returning garbage
    tiny = QuadratureConfig(max_subdivisions=3)
    with pytest.raises(QuadratureError) as excinfo:
        integrate_semi_infinite(
            lambda r: np.cos(40.0 * r) * np.exp(-r), tiny, decay_exponent=1.0
        )
    assert isinstance(excinfo.value.best, IntegralResult)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=-1e-3)
    with pytest.raises(ValueError):
        QuadratureConfig(max_subdivisions=0)


@given(st.floats(min_value=1.0, max_value=6.0))
@settings(max_examples=40, deadline=None)
def test_quadrature_scaled_exponential(a):
    # a*e^{-a r} integrates to 1 for any rate >= 1 (the claimed envelope
    # e^{-r} then genuinely dominates the integrand)
    res = integrate_semi_infinite(
        lambda r: a * np.exp(-a * r), QuadratureConfig(), decay_exponent=1.0
    )
    assert res.value == pytest.approx(1.0, abs=1e-8)
