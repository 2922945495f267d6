import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cddprof.errors import CddError
from cddprof.numerics import (
    INF,
    Bracket,
    CumulativeTable,
    Endpoint,
    Quadrature,
    div,
    find_root,
    integrate,
    integrate_detailed,
    minimize_scalar,
    mul,
    recip,
)


def test_extended_arithmetic_conventions():
    assert recip(INF) == 0.0
    assert recip(0.0) == INF
    assert mul(INF, 0.0) == 0.0
    assert mul(0.0, INF) == 0.0
    assert div(1.0, 0.0) == INF
    assert div(1.0, INF) == 0.0


def test_integrate_constant():
    assert integrate(lambda t: np.ones_like(t), 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)


def test_integrate_inverse_sqrt_singularity():
    val = integrate(lambda t: t**-0.5, 0.0, 1.0, left=Endpoint(kappa=-0.5))
    assert val == pytest.approx(2.0, rel=1e-10)


def test_integrate_divergent_exponent_is_inf():
    assert integrate(lambda t: t**-2.0, 0.0, 1.0, left=Endpoint(kappa=-2.0)) == INF
    assert integrate(lambda t: 1.0 / t, 0.0, 1.0, left=Endpoint(kappa=-1.0)) == INF


def test_integrate_infinite_tails():
    val = integrate(lambda t: np.exp(-t), 0.0, INF, right=Endpoint(rate=-1.0))
    assert val == pytest.approx(1.0, rel=1e-10)
    gauss = integrate(lambda t: np.exp(-0.5 * t * t), -INF, INF,
                      left=Endpoint(rate=-INF), right=Endpoint(rate=-INF))
    assert gauss == pytest.approx(math.sqrt(2 * math.pi), rel=1e-10)
    # nonnegative growth rate is divergent by classification
    assert integrate(lambda t: np.exp(t), 0.0, INF, right=Endpoint(rate=1.0)) == INF
    assert integrate(lambda t: 1.0 / (1.0 + t), 0.0, INF, right=Endpoint(rate=0.0, power=-1.0)) == INF
    val = integrate(lambda t: 1.0 / (1.0 + t) ** 3, 0.0, INF, right=Endpoint(rate=0.0, power=-3.0))
    assert val == pytest.approx(0.5, rel=1e-10)


def test_integrate_both_singular_ends():
    # Beta(1/2, 1/2) = pi
    val = integrate(lambda t: (t * (1 - t)) ** -0.5, 0.0, 1.0,
                    left=Endpoint(kappa=-0.5), right=Endpoint(kappa=-0.5))
    assert val == pytest.approx(math.pi, rel=1e-10)


def test_near_singular_end_in_log_coordinates():
    # 1/(t + 1e-9) on [0, 1]: the blow-up sits just outside the interval
    g = 1e-9
    val = integrate(lambda t: 1.0 / (t + g), 0.0, 1.0, left=Endpoint(kappa=-1.0, gap=g))
    assert val == pytest.approx(math.log1p(1.0 / g), rel=1e-9)


def test_bad_descriptor():
    with pytest.raises(CddError) as e:
        integrate(lambda t: t, 0.0, INF)
    assert e.value.code == "bad-descriptor"


def test_quadrature_failed_on_budget():
    q = Quadrature(rtol=1e-14, max_subdivisions=2)
    with pytest.raises(CddError) as e:
        integrate(lambda t: np.sin(200 * t) ** 2, 0.0, 10.0, q=q)
    assert e.value.code == "quadrature-failed"


def test_error_estimate_reported():
    r = integrate_detailed(lambda t: np.exp(t), 0.0, 1.0)
    assert r.value == pytest.approx(math.e - 1, rel=1e-12)
    assert r.error <= 1e-10 * r.value
    assert r.panels >= 1


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 2.95))
def test_split_additivity(b):
    f = lambda t: np.exp(-t) * t**-0.3
    whole = integrate(f, 0.0, 3.0, left=Endpoint(kappa=-0.3))
    parts = integrate(f, 0.0, b, left=Endpoint(kappa=-0.3)) + integrate(f, b, 3.0)
    assert parts == pytest.approx(whole, rel=3e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 2.0))
def test_monotone_in_integrand(c):
    f = lambda t: np.exp(-t * t)
    h = lambda t: np.exp(-t * t) + c * t * t
    a, b = integrate(f, 0.0, 2.0), integrate(h, 0.0, 2.0)
    assert a <= b + 2e-10 * b


def test_cumulative_table_cdf_and_quantile():
    tab = CumulativeTable(lambda t: np.exp(-t), 0.0, INF, right=Endpoint(rate=-1.0))
    assert tab.total == pytest.approx(1.0, rel=1e-10)
    v = np.array([0.1, 0.5, 0.9])
    x = tab.quantile(v)
    assert np.allclose(x, -np.log1p(-v), rtol=1e-10)


def test_find_root_examples():
    assert find_root(lambda t: t - 0.5, Bracket(0, 1)) == pytest.approx(0.5, abs=1e-12)
    assert find_root(lambda t: math.exp(t) - 3, Bracket(0, 2)) == pytest.approx(math.log(3), abs=1e-12)
    with pytest.raises(CddError) as e:
        find_root(lambda t: t * t + 1, Bracket(0, 1))
    assert e.value.code == "no-root-in-bracket"


def test_find_root_is_deterministic():
    g = lambda t: math.cos(t) - t
    assert find_root(g, (0, 1)) == find_root(g, (0, 1))


def test_bracket_validation():
    with pytest.raises(CddError) as e:
        Bracket(1.0, 1.0)
    assert e.value.code == "bad-interval"


def test_minimize_scalar_examples():
    x, fx = minimize_scalar(lambda t: (t - 1) ** 2, (0, 2))
    assert x == pytest.approx(1.0, abs=1e-6) and fx == pytest.approx(0.0, abs=1e-12)
    x, fx = minimize_scalar(math.cos, (0, 2 * math.pi), starts=8)
    assert x == pytest.approx(math.pi, abs=1e-5) and fx == pytest.approx(-1.0, abs=1e-12)
    x, fx = minimize_scalar(lambda t: 3.0, (0, 1))
    assert fx == 3.0 and 0 <= x <= 1


def test_minimize_scalar_beats_starts():
    g = lambda t: math.sin(3 * t) + 0.1 * t
    starts = np.linspace(0, 6, 9)
    _, fx = minimize_scalar(g, (0, 6), starts=8)
    assert fx <= min(g(s) for s in starts)


def test_minimize_scalar_bad_interval():
    with pytest.raises(CddError) as e:
        minimize_scalar(lambda t: t, (1.0, 0.0))
    assert e.value.code == "bad-interval"
