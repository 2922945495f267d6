import math

import numpy as np
import pytest

from cddprof.cdd_profiles import (
    DiameterSplit,
    case_model_profile,
    case_models,
    equal_value_H,
    finite_mass_exists,
    flat_cdd_profile,
    gl_profile,
    half_masses,
    profile_curve,
    profile_equality_check,
)
from cddprof.errors import CddError
from cddprof.model_density import CDParams

INF = math.inf


def exp_window_flat(v, D, Hs=np.linspace(-60, 60, 240001)):
    """I-flat of e^{Ht} on [0, D] at v, minimized over a dense H-grid (closed form per H)."""
    Hs = Hs[Hs != 0]
    E = np.expm1(Hs * D)
    vals = Hs * (1 + min(v, 1 - v) * E) / E
    vals = np.where(Hs > 0, vals, Hs * (1 + max(v, 1 - v) * E) / E)
    return min(float(np.min(vals)), 1.0 / D)


def test_diameter_split_validation():
    DiameterSplit(0.3, 0.7)
    DiameterSplit(INF, INF)
    with pytest.raises(CddError):
        DiameterSplit(-1.0, 2.0)


def test_half_masses_examples():
    hm = half_masses(0, CDParams(0, INF), DiameterSplit(1, 1))
    assert (hm.left, hm.right) == pytest.approx((1.0, 1.0), rel=1e-12)
    hm = half_masses(0, CDParams(1, -1), DiameterSplit(INF, INF))
    assert (hm.left, hm.right) == pytest.approx((math.sqrt(2), math.sqrt(2)), rel=1e-10)
    hm = half_masses(1, CDParams(0, -1, 4), DiameterSplit(1, 3))
    assert hm.right == INF and math.isfinite(hm.left)


def test_half_masses_monotone_in_H():
    p = CDParams(-1, -2, 2)
    split = DiameterSplit(0.8, 1.2)
    Hs = np.linspace(-3, 3, 31)
    rights = [half_masses(H, p, split).right for H in Hs]
    lefts = [half_masses(H, p, split).left for H in Hs]
    assert all(b >= a * (1 - 1e-12) for a, b in zip(rights, rights[1:]))
    assert all(b <= a * (1 + 1e-12) for a, b in zip(lefts, lefts[1:]))


def test_equal_value_H_examples():
    p = CDParams(0, INF, 2)
    assert equal_value_H(p, DiameterSplit(1, 1), 0.5) == pytest.approx(0.0, abs=1e-12)
    assert equal_value_H(p, DiameterSplit(1, 1), 0.75) == pytest.approx(-math.log(3), abs=1e-10)


def test_equal_value_H_balances_terms():
    p = CDParams(1, -1)
    split = DiameterSplit(INF, INF)
    for v in (0.1, 0.35, 0.8):
        H = equal_value_H(p, split, v)
        hm = half_masses(H, p, split)
        assert v / hm.left == pytest.approx((1 - v) / hm.right, rel=1e-9)


def test_equal_value_H_none_when_all_infinite():
    assert not finite_mass_exists(CDParams(0, -1))
    assert equal_value_H(CDParams(0, -1), DiameterSplit(INF, INF), 0.3) is None


def test_gl_examples():
    assert gl_profile(CDParams(1, INF), 0.5) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-9)
    for p in (CDParams(1, -1), CDParams(-1, 3, 1), CDParams(0, INF, 2)):
        assert gl_profile(p, 0.0) == 0.0 and gl_profile(p, 1.0) == 0.0
    assert np.allclose(gl_profile(CDParams(0, 1, 2), np.array([0.1, 0.5, 0.9])), 0.5)


def test_pathological_case():
    for fn in (gl_profile, flat_cdd_profile):
        with pytest.raises(CddError) as e:
            fn(CDParams(-1, 1, 2), 0.5)
        assert e.value.code == "pathological-case"


def test_flat_examples():
    assert flat_cdd_profile(CDParams(1, -1), 0.5) == pytest.approx(1 / (2 * math.sqrt(2)), rel=1e-8)
    assert np.allclose(flat_cdd_profile(CDParams(0, 1, 2), np.array([0.2, 0.6])), 0.5)


@pytest.mark.parametrize("v", [0.3, 0.5])
def test_flat_exponential_window_against_closed_form(v):
    D = 2.0
    got = flat_cdd_profile(CDParams(0, INF, D), v)
    assert got == pytest.approx(exp_window_flat(v, D), rel=1e-6)


def test_case_models_examples():
    (c,) = case_models(CDParams(1, -1))
    assert c.family == "cosh" and c.free is None
    fams = sorted(m.family for m in case_models(CDParams(0, -2, 1)))
    assert fams == ["power", "uniform"]
    (s,) = case_models(CDParams(-1, -1, 1))
    assert s.family == "sin"
    assert s.free_range == pytest.approx((0.0, math.pi * math.sqrt(2) - 1))
    with pytest.raises(CddError) as e:
        case_models(CDParams(-0.5, 0.5, 1))
    assert e.value.code == "no-case"


@pytest.mark.parametrize("p", [
    CDParams(1, -1), CDParams(1, -2, 1), CDParams(0, -2, 1), CDParams(-1, -1, 1), CDParams(0, INF, 2),
])
def test_model_families_reproduce_flat_profile(p):
    v = np.array([0.2, 0.5, 0.7])
    a, b = flat_cdd_profile(p, v), case_model_profile(p, v)
    assert np.max(np.abs(a - b) / b) <= 1e-6


def test_equality_check_examples():
    v = np.array([0.1, 0.3, 0.5, 0.8])
    assert profile_equality_check(CDParams(0, -2), v) <= 1e-3
    assert profile_equality_check(CDParams(1, INF), v) <= 1e-3
    with pytest.raises(CddError) as e:
        profile_equality_check(CDParams(-0.5, 0.5, math.pi), v)
    assert e.value.code == "equality-not-asserted"


@pytest.mark.parametrize("p", [CDParams(-1, 3, 1), CDParams(1, -0.5), CDParams(0, -2, 1)])
def test_gl_below_flat(p):
    v = np.array([0.15, 0.5, 0.85])
    assert np.all(gl_profile(p, v) <= flat_cdd_profile(p, v) + 1e-6)


def test_gl_reflection_symmetry():
    for p in (CDParams(1, -2, 1), CDParams(-1, 3)):
        v = np.array([0.1, 0.3])
        assert np.allclose(gl_profile(p, v), gl_profile(p, 1 - v), rtol=0, atol=1e-6)


def test_gl_non_increasing_in_D():
    vals = [gl_profile(CDParams(-1, 3, D), 0.3) for D in (1.0, 2.0, 4.0, INF)]
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


def test_all_infinite_mass_gives_zero():
    assert gl_profile(CDParams(0, -1), 0.4) == 0.0
    assert flat_cdd_profile(CDParams(0, -1), 0.4) == 0.0


def test_profile_curve_emits_metadata():
    c = profile_curve(CDParams(1, INF), np.linspace(0, 1, 5), "gl")
    assert c.method == "gl" and c.params == {"rho": 1.0, "N": INF, "D": INF}
    assert c.values[0] == 0.0 and c.values[2] == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-9)
