"""Invariant suites run by ``cddprof verify``.

Each check returns (passed, detail).  Suites are deterministic (fixed seeds) and sized
to run in seconds; the full acceptance criteria live in the test suite.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .comparison import cauchy_schwarz_split, jac_cd_residuals, model_sample, sturm_compare
from .cdd_profiles import flat_cdd_profile, gl_profile, max_relative_gap
from .functionals import (
    cheeger_N,
    cosh_model_cheeger,
    cosh_model_concentration,
    cosh_model_density,
    lorentz_norm,
    poincare_bounds,
    poly_concentration,
    profile_curve_of,
)
from .model_density import CDParams, cd1d_residual, eval_J, named_density, support_roots
from .numerics import Endpoint, find_root, Bracket, integrate
from .profile1d import WeightedDensity1D, brute_force_flat, flat_profile

Check = Callable[[], tuple[bool, str]]


def _numerics() -> dict[str, Check]:
    def split_additivity():
        f = lambda t: np.exp(-t) / np.sqrt(t)
        whole = integrate(f, 0.0, 3.0, left=Endpoint(kappa=-0.5))
        parts = integrate(f, 0.0, 1.3, left=Endpoint(kappa=-0.5)) + integrate(f, 1.3, 3.0)
        return abs(whole - parts) <= 1e-9 * whole, f"gap {abs(whole - parts):.2e}"

    def root_determinism():
        g = lambda t: math.exp(t) - 3.0
        a, b = find_root(g, Bracket(0, 2)), find_root(g, Bracket(0, 2))
        return a == b and abs(a - math.log(3)) < 1e-12, f"root {a!r}"

    def divergence():
        return integrate(lambda t: t**-2.0, 0.0, 1.0, left=Endpoint(kappa=-2)) == math.inf, ""

    return {"split-additivity": split_additivity, "root-determinism": root_determinism,
            "analytic-divergence": divergence}


def _model() -> dict[str, Check]:
    rng = np.random.default_rng(7)

    def equality_ode():
        worst = 0.0
        for _ in range(20):
            H, rho = rng.uniform(-2, 2), rng.uniform(-2, 2)
            N = float(rng.choice([-3.0, -0.5, 0.5, 2.0, 5.0]))
            p = CDParams(rho, N)
            r = support_roots(H, p)
            t = rng.uniform(max(-2, 0.5 * r.xi_minus), min(2, 0.5 * r.xi_plus))
            f = named_density("jacobian", H=H, rho=rho, N=N)
            worst = max(worst, abs(cd1d_residual(f, p, t)))
        return worst <= 1e-6, f"max |residual| {worst:.2e}"

    def reflection():
        worst = 0.0
        for _ in range(20):
            H, rho, t = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1)
            p = CDParams(rho, float(rng.choice([-2.0, 3.0, math.inf])))
            a, b = eval_J(-H, p, t), eval_J(H, p, -t)
            if a != b and not (math.isinf(a) and math.isinf(b)):
                worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
        return worst <= 1e-12, f"max rel gap {worst:.2e}"

    def monotone_in_H():
        p = CDParams(-1.0, -2.0)
        Hs = np.linspace(-3, 3, 61)
        right = np.array([eval_J(H, p, 0.3) for H in Hs])
        left = np.array([eval_J(H, p, -0.3) for H in Hs])
        ok = np.all(np.diff(right) >= 0) and np.all(np.diff(left) <= 0)
        return bool(ok), ""

    def large_N_limit():
        gap = abs(eval_J(0.7, CDParams(0.5, 1e6), 1.0) - eval_J(0.7, CDParams(0.5, math.inf), 1.0))
        return gap <= 1e-3, f"gap {gap:.2e}"

    return {"equality-ode": equality_ode, "reflection": reflection,
            "monotone-in-H": monotone_in_H, "large-N-limit": large_N_limit}


def _profiles() -> dict[str, Check]:
    def complement_symmetry():
        wd = WeightedDensity1D(named_density("exp", (0.0, 3.0), m=1.0, w=-1.0))
        v = np.linspace(0.05, 0.95, 19)
        a = flat_profile(wd, v)
        b = flat_profile(wd.reflected(), 1.0 - v)
        gap = float(np.max(np.abs(a - b)))
        return gap <= 1e-9, f"gap {gap:.2e}"

    def oracle():
        wd = WeightedDensity1D(cosh_model_density(CDParams(1.0, -1.0)))
        v = np.linspace(0.1, 0.9, 9)
        gap = float(np.max(np.abs(flat_profile(wd, v) - brute_force_flat(wd, 20001, v))))
        return gap <= 1e-3, f"gap {gap:.2e}"

    return {"complement-symmetry": complement_symmetry, "brute-force-oracle": oracle}


def _cdd() -> dict[str, Check]:
    v = np.array([0.1, 0.3, 0.5, 0.8])

    def order_and_equality():
        worst_excess, worst_gap = -math.inf, 0.0
        for p in (CDParams(1.0, -0.5), CDParams(1.0, math.inf), CDParams(0.0, -2.0, 1.0)):
            g, f = gl_profile(p, v), flat_cdd_profile(p, v)
            worst_excess = max(worst_excess, float(np.max(g - f)))
            worst_gap = max(worst_gap, max_relative_gap(g, f))
        ok = worst_excess <= 1e-6 and worst_gap <= 1e-3
        return ok, f"gl - flat <= {worst_excess:.2e}, rel gap {worst_gap:.2e}"

    def gaussian():
        x = gl_profile(CDParams(1.0, math.inf), 0.5)
        return abs(x - 1 / math.sqrt(2 * math.pi)) <= 1e-6, f"value {x!r}"

    def reflection_symmetry():
        p = CDParams(-1.0, 3.0, 1.0)
        a, b = gl_profile(p, np.array([0.2, 0.35])), gl_profile(p, np.array([0.8, 0.65]))
        gap = float(np.max(np.abs(a - b)))
        return gap <= 1e-6, f"gap {gap:.2e}"

    def monotone_in_D():
        vals = [gl_profile(CDParams(1.0, -2.0, D), 0.3) for D in (1.0, 2.0, 4.0, math.inf)]
        ok = all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))
        return ok, " ".join(f"{x:.6f}" for x in vals)

    def all_infinite_is_zero():
        x = gl_profile(CDParams(0.0, -1.0), 0.4)
        return x == 0.0, f"value {x!r}"

    return {"order-and-equality": order_and_equality, "gaussian": gaussian,
            "reflection-symmetry": reflection_symmetry, "monotone-in-D": monotone_in_D,
            "all-infinite-mass-gives-zero": all_infinite_is_zero}


def _functionals() -> dict[str, Check]:
    p = CDParams(1.0, -1.0)

    def cheeger():
        wd = WeightedDensity1D(cosh_model_density(p))
        rep = cheeger_N(profile_curve_of(wd, np.linspace(0, 1, 129)), -1.0)
        gap = abs(rep.d_che_inf - cosh_model_cheeger(p))
        return gap <= 1e-6, f"gap {gap:.2e}"

    def concentration():
        r = np.linspace(0, 20, 201)
        K = cosh_model_concentration(p, r)
        bound = poly_concentration(2.0 * 2.0 * cosh_model_cheeger(p) / 2.0, -1.0, r)
        return bool(np.all(K <= bound + 1e-9)), ""

    def poincare():
        b = poincare_bounds(p, cosh_model_cheeger(p))
        a, c = b["positive_curvature"]["value"], b["mazya_cheeger"]["value"]
        return abs(a - c) <= 1e-12 * a, f"{a!r} vs {c!r}"

    def lorentz_monotone():
        rng = np.random.default_rng(3)
        vals, w = rng.uniform(0, 5, 8), rng.dirichlet(np.ones(8))
        norms = [lorentz_norm(vals, w, 2.0, r) for r in (0.5, 1.0, 2.0, 4.0, math.inf)]
        return all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:])), ""

    return {"cheeger": cheeger, "n-concentration": concentration, "poincare": poincare,
            "lorentz-monotone": lorentz_monotone}


def _comparison() -> dict[str, Check]:
    rng = np.random.default_rng(11)

    def equality_case():
        worst = 0.0
        for _ in range(10):
            H, rho = rng.uniform(-3, 3), rng.uniform(-2, 2)
            p = CDParams(rho, float(rng.choice([-5.0, -1.0, -0.5, 3.0, math.inf])))
            r = support_roots(H, p)
            s = model_sample(H, p, max(-1.5, 0.5 * r.xi_minus), min(1.5, 0.5 * r.xi_plus), 20001)
            worst = max(worst, float(np.max(np.abs(jac_cd_residuals(s, p)))))
        return worst <= 1e-5, f"max |residual| {worst:.2e}"

    def domination():
        p = CDParams(0.5, -1.0)
        s = model_sample(0.4, p, -1.0, 1.0, 2001, eps=0.1)
        ok, worst = sturm_compare(s, p)
        return ok, f"excess {worst:.2e}"

    def cauchy_schwarz():
        fails = 0
        for _ in range(100):
            a, b = rng.uniform(0.01, 5, 2)
            A, B = rng.uniform(-10, 10, 2)
            lhs, rhs, _ = cauchy_schwarz_split(a, b, A, B)
            fails += lhs < rhs - 1e-12 * max(1.0, abs(lhs))
        return fails == 0, f"{fails} failures"

    return {"equality-case": equality_case, "domination": domination,
            "cauchy-schwarz": cauchy_schwarz}


SUITES = {
    "numerics": _numerics,
    "model": _model,
    "profiles": _profiles,
    "cdd": _cdd,
    "functionals": _functionals,
    "comparison": _comparison,
}


def run_suite(name: str = "all") -> list[tuple[str, bool, str]]:
    """Run one suite (or all); returns (check name, passed, detail) rows."""
    names = list(SUITES) if name == "all" else [name]
    rows = []
    for s in names:
        if s not in SUITES:
            raise KeyError(s)
        for check, fn in SUITES[s]().items():
            try:
                ok, detail = fn()
            except Exception as e:  # a crashing check is a failing check
                ok, detail = False, f"error: {e}"
            rows.append((f"{s}/{check}", bool(ok), detail))
    return rows
