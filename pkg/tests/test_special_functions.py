import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minormax.special_functions import (
    QuadratureError,
    QuadratureSpec,
    adaptive_integrate,
    integrate_left_singular,
    log_std_normal_pdf,
    log_std_normal_sf,
    lower_incomplete_gamma,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_sf,
)


@pytest.fixture(autouse=True)
def _mp_precision():
    # per test, since module-level settings leak across test files
    with mpmath.workdps(40):
        yield


def kummer_lower_gamma(a, x, terms=200):
    """gamma(a, x) = x^a e^-x sum_k x^k / (a (a+1) ... (a+k))."""
    total, term = 0.0, 1.0 / a
    for k in range(terms):
        total += term
        term *= x / (a + k + 1)
        if term < 1e-18 * total:
            break
    return x ** a * math.exp(-x) * total


# --- normal density ----------------------------------------------------------

def test_pdf_at_zero():
    assert std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, rel=1e-15)


@given(st.floats(-30, 30))
def test_pdf_symmetric(x):
    assert std_normal_pdf(x) == std_normal_pdf(-x)


def test_pdf_far_tail_flushes_and_log_path_is_exact():
    assert std_normal_pdf(40.0) == 0.0
    assert log_std_normal_pdf(40.0) == pytest.approx(-800.0 - 0.5 * math.log(2 * math.pi),
                                                     rel=1e-15)


# --- cdf / sf ------------------------------------------------------------------

def test_cdf_at_zero():
    assert std_normal_cdf(0.0) == 0.5


def test_cdf_plus_sf_is_one():
    x = np.linspace(-10, 10, 2001)
    assert np.max(np.abs(std_normal_cdf(x) + std_normal_sf(x) - 1.0)) <= 1e-15


def test_sf_relative_accuracy_vs_mpmath():
    for x in [-5.0, -1.0, 0.0, 0.5, 1.0, 3.0, 7.5, 12.0, 20.0, 30.0, 38.0]:
        exact = float(mpmath.ncdf(-x))
        assert abs(std_normal_sf(x) / exact - 1.0) <= 1e-13, x


def test_sf_matches_tail_asymptotic_at_40():
    z = 40.0
    # sf(z) sqrt(2 pi) z e^{z^2/2} = 1 - 1/z^2 + ...; done in logs since sf(40) ~ 1e-350
    lead = log_std_normal_sf(z) + 0.5 * math.log(2 * math.pi) + math.log(z) + 0.5 * z * z
    assert abs(math.exp(lead) - 1.0) <= 2e-3


@given(st.floats(-30, 30))
def test_sf_reflection(x):
    assert std_normal_sf(-x) + std_normal_sf(x) == pytest.approx(1.0, abs=1e-15)


def test_cdf_monotone_on_dense_grid():
    x = np.linspace(-10, 10, 10_000)
    assert np.all(np.diff(std_normal_cdf(x)) >= 0)


def test_sf_equals_reflected_cdf():
    x = np.linspace(-10, 10, 4001)
    assert np.max(np.abs(std_normal_sf(x) - std_normal_cdf(-x))) <= 1e-14


def test_log_sf_agrees_with_mpmath_deep_tail():
    for x in [1.0, 10.0, 40.0, 100.0]:
        assert log_std_normal_sf(x) == pytest.approx(float(mpmath.log(mpmath.ncdf(-x))), rel=1e-13)


# --- incomplete gamma ---------------------------------------------------------

@given(st.floats(0, 50))
def test_gamma_a1_closed_form(x):
    assert lower_incomplete_gamma(1.0, x) == pytest.approx(-math.expm1(-x), rel=1e-13, abs=1e-300)


def test_gamma_at_zero():
    assert lower_incomplete_gamma(0.3, 0.0) == 0.0


def test_gamma_half_one_vs_kummer_series():
    assert lower_incomplete_gamma(0.5, 1.0) == pytest.approx(kummer_lower_gamma(0.5, 1.0), rel=1e-12)


@pytest.mark.parametrize("a", [0.05, 1 / 3, 0.5, 0.95, 1.0])
@pytest.mark.parametrize("x", [1e-8, 0.1, 1.0, 5.0, 20.0])
def test_gamma_grid_vs_kummer_series(a, x):
    assert lower_incomplete_gamma(a, x) == pytest.approx(kummer_lower_gamma(a, x), rel=1e-12)


@settings(max_examples=50)
@given(st.floats(0.01, 1.0), st.floats(0, 100), st.floats(0, 100))
def test_gamma_monotone_and_bounded(a, x1, x2):
    lo, hi = sorted([x1, x2])
    g_lo, g_hi = lower_incomplete_gamma(a, lo), lower_incomplete_gamma(a, hi)
    assert g_lo <= g_hi <= math.gamma(a) * (1 + 1e-15)


def test_gamma_limit_is_complete_gamma():
    assert lower_incomplete_gamma(0.4, 200.0) == pytest.approx(math.gamma(0.4), rel=1e-14)


@pytest.mark.parametrize("a,x", [(0.0, 1.0), (1.5, 1.0), (-0.1, 1.0), (0.5, -1.0)])
def test_gamma_domain_errors(a, x):
    with pytest.raises(ValueError):
        lower_incomplete_gamma(a, x)


# --- quadrature -------------------------------------------------------------------

def test_spec_validation():
    for kw in [dict(abs_tol=0), dict(rel_tol=-1), dict(max_depth=0), dict(max_depth=2.5)]:
        with pytest.raises(ValueError):
            QuadratureSpec(**kw)


def test_integrate_constant():
    assert adaptive_integrate(lambda x: np.ones_like(x), 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_integrate_normal_density():
    assert adaptive_integrate(std_normal_pdf, -8.0, 8.0) == pytest.approx(1.0, abs=1e-10)


def test_left_singularity_substitution():
    val = integrate_left_singular(lambda s: s ** -0.5, 0.0, 1.0)
    assert val == pytest.approx(2.0, abs=1e-9)


def test_scalar_callable_mode():
    val = adaptive_integrate(math.cos, 0.0, math.pi / 2, vectorized=False)
    assert val == pytest.approx(1.0, abs=1e-13)


def test_bit_deterministic():
    f = lambda x: np.exp(-x * x) * np.cos(5 * x)  # noqa: E731
    vals = {adaptive_integrate(f, -3.0, 4.0).hex() for _ in range(5)}
    assert len(vals) == 1


def test_nan_integrand_raises():
    with pytest.raises(QuadratureError):
        adaptive_integrate(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_depth_cap_raises():
    spec = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-15, max_depth=3)
    with pytest.raises(QuadratureError):
        adaptive_integrate(lambda x: np.sign(x - 1 / 3), 0.0, 1.0, spec)


def test_bad_limits():
    with pytest.raises(ValueError):
        adaptive_integrate(np.sin, 1.0, 0.0)
    with pytest.raises(ValueError):
        adaptive_integrate(np.sin, 0.0, math.inf)
    assert adaptive_integrate(np.sin, 2.0, 2.0) == 0.0
