import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from cddprof.errors import CddError
from cddprof.functionals import (
    CHEEGER_C,
    TWO_LEVEL_C,
    ConcentrationCurve,
    ball_certificate,
    cheeger_N,
    cheeger_lower_bound,
    concentration_to_cheeger,
    cosh_estimates,
    cosh_integral,
    cosh_model_cheeger,
    cosh_model_concentration,
    cosh_model_density,
    fm_bound,
    lorentz_norm,
    nash_constant,
    poincare_bounds,
    poly_concentration,
    profile_curve_of,
    sobolev_constants,
    sobolev_transfer,
    stability_w1,
    two_level_bound,
    two_level_constant,
)
from cddprof.model_density import CDParams, named_density
from cddprof.profile1d import ProfileCurve, normalize

INF = math.inf
GRID = np.linspace(0.0, 1.0, 129)


def cosh_curve(p):
    return profile_curve_of(normalize(cosh_model_density(p)), GRID)


def test_cheeger_cosh_model():
    rep = cheeger_N(cosh_curve(CDParams(1, -1)), -1.0, cd0=True)
    assert rep.d_che_inf == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert rep.argmin_v == 0.5
    assert rep.d_che_N == pytest.approx(math.sqrt(2), abs=1e-6)
    assert rep.half_value == pytest.approx(math.sqrt(2), abs=1e-6)


def test_cheeger_uniform_and_zero():
    D = 3.0
    rep = cheeger_N(ProfileCurve(GRID, np.full_like(GRID, 1 / D)), INF)
    assert rep.d_che_N == pytest.approx(2 / D, rel=1e-12) and rep.argmin_v == 0.5
    rep = cheeger_N(ProfileCurve(GRID, np.zeros_like(GRID)), -2.0)
    assert rep.d_che_N == 0.0 and rep.d_che_inf == 0.0


def test_cosh_integral_against_quadrature():
    for N in (-8.0, -1.0, 0.5):
        ref, _ = quad(lambda t: math.exp((N - 1) * (t + math.log1p(math.exp(-2 * t)) - math.log(2))), 0, INF)
        assert cosh_integral(N) == pytest.approx(ref, rel=1e-10)
    assert cosh_integral(-1.0) == pytest.approx(1.0, rel=1e-14)


def test_poly_concentration_examples():
    assert poly_concentration(math.sqrt(2), -1.0, 0.0) == pytest.approx(0.5, rel=1e-15)
    assert poly_concentration(math.sqrt(2), -1.0, math.sqrt(2)) == pytest.approx(0.25, rel=1e-14)
    N, d = 3.0, 0.7
    r0 = N * 0.5 ** (1 / N) / d
    assert poly_concentration(d, N, r0 * (1 - 1e-9)) > 0
    assert poly_concentration(d, N, r0 * (1 + 1e-9)) == 0.0


def test_concentration_to_cheeger_examples():
    r = np.linspace(0.0, 2.0, 401)
    K = ConcentrationCurve(r, np.maximum(0.5 - r, 0.0))
    assert concentration_to_cheeger(K, INF) == pytest.approx(2.0 * 1.0, rel=1e-12)
    assert concentration_to_cheeger(ConcentrationCurve(r, np.full_like(r, 0.5)), INF) == 0.0
    assert ball_certificate(1.0, INF) == pytest.approx(0.25)


def test_concentration_curve_validation():
    with pytest.raises(CddError):
        ConcentrationCurve([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(CddError):
        ConcentrationCurve([0.0, 1.0], [0.2, 0.4])


def test_cosh_concentration_examples():
    p = CDParams(1, -1)
    assert cosh_model_concentration(p, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert cosh_model_concentration(p, math.sqrt(2)) == pytest.approx((1 - math.tanh(1)) / 2, abs=1e-12)
    assert cosh_model_concentration(p, 1e4) == 0.0


def test_cosh_concentration_below_polynomial_bound():
    for N in (-4.0, -1.0, -0.5):
        p = CDParams(1.0, N)
        rep = cheeger_N(cosh_curve(p), N, cd0=True)
        r = np.linspace(0, 30, 301)
        assert np.all(cosh_model_concentration(p, r) <= poly_concentration(rep.d_che_N, N, r) + 1e-9)


def test_concentration_chain_recovers_cheeger():
    p = CDParams(1.0, -1.0)
    r = np.linspace(0, 40, 40001)
    K = ConcentrationCurve(r, cosh_model_concentration(p, r))
    rep = cheeger_N(cosh_curve(p), -1.0)
    assert concentration_to_cheeger(K, -1.0) == pytest.approx(rep.d_che_N, rel=0.02)


def test_two_level_bound_holds():
    for p in (CDParams(1.0, -1.0), CDParams(2.0, -4.0), CDParams(0.5, 0.5)):
        C = two_level_constant(p)
        r = np.linspace(0.0, 60.0, 2001)
        assert np.all(cosh_model_concentration(p, r) <= two_level_bound(p, r, C))
    assert TWO_LEVEL_C == pytest.approx(1 / (2 * math.cosh(2) ** 2))


def test_cheeger_lower_bound_on_N_grid():
    for N in np.linspace(-8, 0.9, 25):
        p = CDParams(1.3, float(N))
        assert cosh_model_cheeger(p) >= cheeger_lower_bound(p)
    assert CHEEGER_C > 0


def test_lorentz_examples():
    assert lorentz_norm([1.0, 0.0], [0.3, 0.7], 2.0, 1.0) == pytest.approx(math.sqrt(0.3), abs=1e-12)
    vals, w = np.array([3.0, -1.0, 0.5, 2.0]), np.array([0.1, 0.2, 0.3, 0.4])
    plain = float(np.sum(w * np.abs(vals) ** 3)) ** (1 / 3)
    assert lorentz_norm(vals, w, 3.0, 3.0) == pytest.approx(plain, rel=1e-12)
    assert lorentz_norm([2.5], [1.0], 1.7, 0.8) == pytest.approx(2.5, rel=1e-12)
    assert lorentz_norm([2.5], [1.0], 1.7, INF) == pytest.approx(2.5, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.3, 4.0))
def test_lorentz_monotone_in_r(seed, alpha):
    rng = np.random.default_rng(seed)
    vals, w = rng.uniform(-5, 5, 6), rng.dirichlet(np.ones(6))
    norms = [lorentz_norm(vals, w, alpha, r) for r in (0.3, 1.0, 2.5, 7.0, INF)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:]))


def test_sobolev_examples():
    b = sobolev_constants(0.5, 1.0, -1.0, math.sqrt(2))
    assert b.C_pq == pytest.approx(math.sqrt(2), abs=1e-12)
    assert 1 / b.gagliardo == pytest.approx(b.C_pq, rel=1e-12)
    N = -3.0
    # endpoint p = -N forces 1/q = 0
    assert math.isfinite(sobolev_constants(-N, INF, N, 1.0).C_pq)
    with pytest.raises(CddError) as e:
        sobolev_constants(2.0, 2.0, -1.0, 1.0)
    assert e.value.code == "bad-exponents"


def test_sobolev_transfer_examples():
    C = sobolev_transfer(0.5, 1.0, math.sqrt(2), 0.5, 1.0, -1.0)
    assert C == pytest.approx(2**5 * 0.5 * 0.5 ** -1.0 * math.sqrt(2), rel=1e-12)
    assert C >= math.sqrt(2)
    # N=-2, p2=1: the factor (1 + p2/N)^-(1/p2 + 1/N) = 0.5^-0.5
    assert sobolev_transfer(0.5, 1.0, 1.0, 1.0, 2.0, -2.0) == pytest.approx(32 * math.sqrt(2), rel=1e-12)
    with pytest.raises(CddError) as e:
        sobolev_transfer(0.5, 0.1, 1.0, 0.5, 1.0, -1.0)
    assert e.value.code == "bad-exponents"


def test_nash_examples():
    n = nash_constant(1.0, -1.0, math.sqrt(2))
    assert n.coefficient == pytest.approx(2**0.25, abs=1e-12)
    assert (n.gradient_exponent, n.sup_exponent) == pytest.approx((0.5, 0.5))
    far = nash_constant(1.0, -1e9, 2.0)
    assert far.gradient_exponent == pytest.approx(1.0, abs=1e-8)
    assert far.sup_exponent == pytest.approx(0.0, abs=1e-8)
    assert far.coefficient == pytest.approx(0.5, rel=1e-6)
    assert nash_constant(1.0, -1.0, 1e12).coefficient < 1e-5


def test_poincare_examples():
    p = CDParams(1, -1, 2)
    b = poincare_bounds(p, 1 / math.sqrt(2))
    assert b["lichnerowicz"]["value"] == 2.0
    assert b["positive_curvature"]["value"] == pytest.approx(8.0, rel=1e-14)
    assert b["mazya_cheeger"]["value"] == pytest.approx(8.0, rel=1e-14)
    assert b["diameter"]["value"] == 16.0
    assert set(poincare_bounds(CDParams(-1, -1))) == set()


def test_poincare_consistency_across_N():
    for N in (-8.0, -2.0, -0.5, 0.5):
        p = CDParams(1.7, N)
        b = poincare_bounds(p, cosh_model_cheeger(p))
        a, c = b["positive_curvature"]["value"], b["mazya_cheeger"]["value"]
        assert abs(a - c) <= 1e-12 * a


def test_cosh_estimates():
    e = cosh_estimates(-1.0, 0.0)
    assert e.lower[0] == e.value[0] == e.upper[0] == 1.0
    for N in (-4.0, -1.0, 0.5):
        e = cosh_estimates(N, np.linspace(0, 20, 10_000))
        assert e.violations == 0
        lo, hi = e.bracket
        assert lo <= cosh_integral(N) <= hi
    lo, hi = cosh_estimates(-1.0, 1.0).bracket
    assert lo == pytest.approx(0.8862, abs=1e-4) and hi == pytest.approx(10.41, abs=1e-2)


def test_fm_bound_examples():
    assert fm_bound(1.0, -2.0) == pytest.approx(2 * math.sqrt(2), abs=1e-10)
    with pytest.raises(CddError) as e:
        fm_bound(1.0, -1.0)
    assert e.value.code == "fm-divergent"
    assert fm_bound(1e12, -2.0) < 1e-11
    # closed form against quadrature of the concentration bound
    for N, d in ((-3.0, 0.8), (4.0, 1.3)):
        ref, _ = quad(lambda r: poly_concentration(d, N, r), 0, INF, limit=200)
        assert fm_bound(d, N) == pytest.approx(2 * ref, rel=1e-8)


def test_stability_examples():
    assert stability_w1(1.0, -2.0, 1.0) == pytest.approx(0.04618, abs=1e-4)
    assert stability_w1(1.0, -2.0, 0.0) > 0
    assert stability_w1(1.0, -2.0, INF) == 0.0
    with pytest.raises(CddError):
        stability_w1(1.0, -0.5, 1.0)


def test_linear_cheeger_power_models():
    for N in (-3.0, -1.0):
        for D in (1.0, 2.0):
            for xi in np.linspace(0.05, 10.0, 8):
                wd = normalize(named_density("power", (xi, xi + D), N=N))
                rep = cheeger_N(profile_curve_of(wd, GRID), N)
                assert rep.d_che_inf >= 1 / D - 1e-6
