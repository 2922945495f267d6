"""Acceptance criteria, one check per criterion.

Each check returns (passed, detail) and prints a single PASS/FAIL line.  Run with pytest
or directly: ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from cddprof.cdd_profiles import equality_range, flat_cdd_profile, gl_profile, max_relative_gap
from cddprof.comparison import cauchy_schwarz_split, jac_cd_check, jac_cd_residuals, model_sample, sturm_compare
from cddprof.functionals import (
    ConcentrationCurve,
    cheeger_N,
    concentration_to_cheeger,
    cosh_estimates,
    cosh_model_concentration,
    cosh_model_density,
    fm_bound,
    lorentz_norm,
    nash_constant,
    poincare_bounds,
    poly_concentration,
    profile_curve_of,
    sobolev_constants,
    stability_w1,
)
from cddprof.model_density import CDParams, ModelDensity, named_density, support_roots
from cddprof.profile1d import brute_force_flat, brute_force_interval_profile, flat_profile, normalize

INF = math.inf
GRID = np.linspace(0.0, 1.0, 129)


def cosh_integral_quad(N):
    """int_0^inf cosh^{N-1} by adaptive quadrature, written to avoid overflow."""
    f = lambda t: math.exp((N - 1) * (t + math.log1p(math.exp(-2 * t)) - math.log(2)))
    return quad(f, 0, INF, epsabs=0, epsrel=1e-13, limit=200)[0]


def cosh_cheeger(rho, N):
    wd = normalize(cosh_model_density(CDParams(rho, N)))
    return cheeger_N(profile_curve_of(wd, GRID), N, cd0=True)


def c01_cosh_cheeger():
    base = cosh_cheeger(1.0, -1.0).d_che_inf
    worst = abs(base - 1 / math.sqrt(2))
    for N in (-8.0, -4.0, -2.0, -1.0, -0.5, 0.5):
        for rho in (1.0, 2.5):
            exact = math.sqrt(rho / (1 - N)) / cosh_integral_quad(N)
            worst = max(worst, abs(cosh_cheeger(rho, N).d_che_inf - exact))
    return worst <= 1e-6, f"d_che_inf(1,-1)={base:.10f}, max abs gap {worst:.2e}"


def c02_gaussian():
    p = CDParams(1.0, INF)
    half = gl_profile(p, 0.5)
    v = np.linspace(0, 1, 33)[1:-1]
    gap = float(np.max(np.abs(gl_profile(p, v) - norm.pdf(norm.ppf(v)))))
    ok = abs(half - 1 / math.sqrt(2 * math.pi)) <= 1e-6 and gap <= 1e-4
    return ok, f"I(1/2)={half:.10f}, max gap to phi(Phi^-1(v)) {gap:.2e}"


TRIPLES = [(-1, -2, 1), (-1, -0.5, 1), (-1, 3, 1), (0, -2, 1), (0, INF, 1), (1, -0.5, 1),
           (1, 3, 1), (-1, INF, 1), (1, -2, INF), (1, -0.5, INF), (1, 3, INF), (1, INF, INF)]


def c03_order_and_equality():
    v = np.linspace(0, 1, 9)
    excess, gap, n_eq = -INF, 0.0, 0
    for rho, N, D in TRIPLES:
        p = CDParams(rho, N, D)
        g, f = gl_profile(p, v), flat_cdd_profile(p, v)
        excess = max(excess, float(np.max(g - f)))
        if equality_range(p):
            n_eq += 1
            gap = max(gap, max_relative_gap(g, f))
    ok = excess <= 1e-6 and gap <= 1e-3
    return ok, f"max(gl - flat)={excess:.2e}, max rel gap {gap:.2e} on {n_eq} equality triples"


def c04_counterexample():
    wd = normalize(named_density("sin", N=0.5, delta=1.0))  # rho = N - 1 = -1/2
    a = brute_force_interval_profile(wd, 20001, 0.05)
    b = brute_force_flat(wd, 20001, 0.05)
    return a < 0.9 * b, f"interval {a:.6f} vs flat {b:.6f} (ratio {a / b:.4f})"


def c05_weak_concavity():
    v = np.linspace(0, 1, 513)
    worst_rise, worst_arg = -INF, 0.0
    for N in (-4.0, -2.0, -1.0):
        wd = normalize(named_density("power", (0.0, INF), N=N, shift=-1.0, coef=abs(N)))
        I = flat_profile(wd, v[1:-1])
        ratio = I ** (N / (N - 1)) / v[1:-1]
        worst_rise = max(worst_rise, float(np.max(np.diff(ratio))))
        rep = cheeger_N(profile_curve_of(wd, v), N)
        worst_arg = max(worst_arg, abs(rep.argmin_v - 0.5))
    ok = worst_rise <= 1e-9 and worst_arg <= 1 / 512
    return ok, f"max rise {worst_rise:.2e}, argmin offset {worst_arg:.2e}"


def c06_concentration_chain():
    r = np.linspace(0, 40, 40001)
    rel, over = 0.0, -INF
    for N in (-4.0, -1.0, -0.5):
        p = CDParams(1.0, N)
        K = cosh_model_concentration(p, r)
        rep = cosh_cheeger(1.0, N)
        rel = max(rel, abs(concentration_to_cheeger(ConcentrationCurve(r, K), N) / rep.d_che_N - 1))
        over = max(over, float(np.max(K - poly_concentration(rep.d_che_N, N, r))))
    k = cosh_model_concentration(CDParams(1.0, -1.0), math.sqrt(2))
    kgap = abs(k - (1 - math.tanh(1)) / 2)
    ok = rel <= 0.02 and over <= 1e-9 and kgap <= 1e-8
    return ok, f"rel gap {rel:.2e}, max(K0 - bound) {over:.2e}, K0(sqrt2) gap {kgap:.2e}"


def c07_linear_cheeger():
    worst = INF
    for N in (-3.0, -1.0):
        for D in (1.0, 2.0):
            for xi in np.geomspace(1e-2, 1e2, 32):
                wd = normalize(named_density("power", (xi, xi + D), N=N))
                d = cheeger_N(profile_curve_of(wd, GRID), N).d_che_inf
                worst = min(worst, d - 1 / D)
    return worst >= -1e-6, f"min(d_che_inf - 1/D) {worst:.2e}"


def c08_poincare():
    d = cosh_cheeger(1.0, -1.0).d_che_inf
    b = poincare_bounds(CDParams(1.0, -1.0), d)
    pc, mc = b["positive_curvature"]["value"], b["mazya_cheeger"]["value"]
    lich = b["lichnerowicz"]["value"]
    diam = poincare_bounds(CDParams(0.0, -1.0, 2.0))["diameter"]["value"]
    rel = abs(pc - 4 / d**2) / pc
    ok = rel <= 1e-10 and lich == 2.0 and diam == 16.0
    return ok, f"positive_curvature {pc!r} vs 4/d^2 {mc!r} (rel {rel:.1e}), lichnerowicz {lich}, diameter {diam}"


def c09_sandwich():
    t = np.linspace(0, 20, 10_000)
    bad, outside = 0, []
    for N in (-4.0, -1.0, 0.5):
        e = cosh_estimates(N, t)
        bad += e.violations
        lo, hi = e.bracket
        if not lo <= cosh_integral_quad(N) <= hi:
            outside.append(N)
    return bad == 0 and not outside, f"{bad} sandwich violations, bracket misses {outside}"


def c10_sturm_suite():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(50):
        H, rho = rng.uniform(-3, 3), rng.uniform(-2, 2)
        p = CDParams(rho, float(rng.choice([-5.0, -1.0, -0.5, 3.0, INF])))
        r = support_roots(H, p)
        s = model_sample(H, p, max(-1.5, 0.5 * r.xi_minus), min(1.5, 0.5 * r.xi_plus), 20001)
        worst = max(worst, float(np.max(np.abs(jac_cd_residuals(s, p)))))
    certified = dominated = 0
    for _ in range(40):
        H, rho = rng.uniform(-3, 3), rng.uniform(-2, 2)
        p = CDParams(rho, float(rng.choice([-5.0, -1.0, -0.5, 3.0, INF])))
        r = support_roots(H, p)
        lo, hi = max(-1.5, 0.5 * r.xi_minus), min(1.5, 0.5 * r.xi_plus)
        for eps in (0.0, 0.1):
            s = model_sample(H, p, lo, hi, 20001, eps=eps)
            if jac_cd_check(s, p) < -1e-5:
                continue
            certified += 1
            dominated += sturm_compare(s, p)[0]
    cs_ok = 0
    for k in range(400):
        if k < 200:
            a, b = rng.uniform(0.01, 10, 2)
        else:
            pos, neg = rng.uniform(0.01, 10), -rng.uniform(0.01, 10)
            a, b = (pos, neg - pos) if k % 2 else (neg - pos, pos)
        A, B = rng.uniform(-10, 10, 2)
        lhs, rhs, valid = cauchy_schwarz_split(a, b, A, B)
        cs_ok += valid and lhs >= rhs - 1e-12 * max(1.0, abs(lhs), abs(rhs))
    ok = worst <= 1e-5 and dominated == certified > 0 and cs_ok == 400
    return ok, f"residual {worst:.2e}, dominated {dominated}/{certified}, cauchy-schwarz {cs_ok}/400"


def c11_oracles():
    n = 20001
    v = np.linspace(0.1, 0.9, 9)
    gauss = lambda t: np.exp(-0.5 * t * t)
    dens = [
        named_density("exp", (0.0, 40.0), m=1.0, w=-1.0),
        named_density("cosh", N=-1, delta=-0.5),
        named_density("power", (1.0, 3.0), N=-2),
        named_density("sin", (0.0, math.pi), N=3, delta=1.0),
        ModelDensity("custom", (-10.0, 10.0), func=gauss),
    ]
    worst = 0.0
    for f in dens:
        wd = normalize(f)
        worst = max(worst, float(np.max(np.abs(flat_profile(wd, v) - brute_force_flat(wd, n, v)))))
    wd = normalize(cosh_model_density(CDParams(1.0, -1.0)))
    bob = float(np.max(np.abs(brute_force_interval_profile(wd, n, v) - brute_force_flat(wd, n, v))))
    ok = worst <= max(1e-3, 3.0 / n) and bob <= 1e-3
    return ok, f"flat vs brute {worst:.2e}, interval vs half-line {bob:.2e}"


def c12_constants():
    gaps = {
        "lorentz": abs(lorentz_norm([1.0, 0.0], [0.3, 0.7], 2.0, 1.0) - math.sqrt(0.3)),
        "sobolev": abs(sobolev_constants(0.5, 1.0, -1.0, math.sqrt(2)).C_pq - math.sqrt(2)),
        "nash": abs(nash_constant(1.0, -1.0, math.sqrt(2)).coefficient - 2**0.25),
        "fm": abs(fm_bound(1.0, -2.0) - 2 * math.sqrt(2)),
        "stability": abs(stability_w1(1.0, -2.0, 1.0) - 0.04618),
    }
    tol = {"lorentz": 1e-12, "sobolev": 1e-12, "nash": 1e-12, "fm": 1e-10, "stability": 1e-4}
    ok = all(gaps[k] <= tol[k] for k in gaps)
    return ok, ", ".join(f"{k} {g:.1e}" for k, g in gaps.items())


CRITERIA = [c01_cosh_cheeger, c02_gaussian, c03_order_and_equality, c04_counterexample,
            c05_weak_concavity, c06_concentration_chain, c07_linear_cheeger, c08_poincare,
            c09_sandwich, c10_sturm_suite, c11_oracles, c12_constants]


def line(i, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    name = fn.__name__.split("_", 1)[1]
    return ok, f"criterion {i:2d} {name}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - t0:.1f}s) {detail}"


@pytest.mark.parametrize("i", range(1, 13))
def test_criterion(i, capsys):
    ok, text = line(i, CRITERIA[i - 1])
    with capsys.disabled():
        print("\n" + text)
    assert ok, text


if __name__ == "__main__":
    results = [line(i, fn) for i, fn in enumerate(CRITERIA, 1)]
    for _, text in results:
        print(text)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
