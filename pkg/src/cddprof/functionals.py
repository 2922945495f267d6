"""Constants and transfer inequalities derived from isoperimetric profiles.

Cheeger constants of sampled profiles, concentration bounds, Lorentz quasi-norms of
step functions, weak Sobolev / Nash constants, Poincare bounds, the cosh model of
positive curvature and the explicit W1 stability chain.  Everything except
``lorentz_norm`` and the profile-based routines is closed-form constant arithmetic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import beta, betainc

from .errors import CddError
from .model_density import CDParams, ModelDensity, named_density
from .profile1d import ProfileCurve, WeightedDensity1D, flat_profile

log = logging.getLogger(__name__)

INF = math.inf
COSH2 = math.cosh(2.0)
# lower sandwich constant: cosh t >= exp(c' min(t^2/2, t)) with c' = 1/cosh(2)^2
SANDWICH_C = 1.0 / COSH2**2
# concentration decay constant of the two-level bound
TWO_LEVEL_C = 1.0 / (2.0 * COSH2**2)
# Cheeger lower-bound constant obtained from the upper integral bracket
CHEEGER_C = 1.0 / (math.sqrt(math.pi / 2.0) * COSH2 + COSH2**2)


def _dim_exponent(N: float) -> float:
    """(N - 1) / N, with the limit 1 at N = inf."""
    if N == 0:
        raise CddError("bad-params", "N = 0 has no Cheeger exponent")
    return 1.0 if math.isinf(N) else (N - 1.0) / N


# ---------------------------------------------------------------------------
# Cheeger constants


@dataclass
class CheegerReport:
    d_che_N: float
    d_che_inf: float
    argmin_v: float
    N: float
    half_value: float | None = None  # 2^{(N-1)/N} I(1/2), only for CD(0,N)-certified input

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hypothesis"] = "CD(0,N) certified" if self.half_value is not None else "none"
        return d


def _argmin_near_half(v: np.ndarray, q: np.ndarray, rtol: float) -> tuple[float, float]:
    best = float(np.min(q))
    if not math.isfinite(best):
        return best, 0.5
    ties = np.flatnonzero(q <= best + rtol * abs(best))
    i = ties[np.argmin(np.abs(v[ties] - 0.5))]
    return best, float(v[i])


def cheeger_N(c: ProfileCurve, N: float, cd0: bool = False, tie_rtol: float = 1e-8) -> CheegerReport:
    """Grid infimum of I(v) / min(v, 1-v)^{(N-1)/N} over the interior grid points.

    Ties within ``tie_rtol`` are broken toward v = 1/2.  With ``cd0=True`` the caller
    certifies CD(0,N) and the shortcut 2^{(N-1)/N} I(1/2) is reported as well.
    """
    e = _dim_exponent(N)
    v, I = c.grid, c.values
    inner = (v > 0) & (v < 1)
    v, I = v[inner], I[inner]
    if v.size == 0:
        raise CddError("bad-curve", "curve has no interior grid points")
    m = np.minimum(v, 1.0 - v)
    with np.errstate(divide="ignore", invalid="ignore"):
        qN = np.where(I == 0, 0.0, I / m**e)
        q1 = np.where(I == 0, 0.0, I / m)
    d_N, arg = _argmin_near_half(v, qN, tie_rtol)
    half = None
    if cd0:
        half = 2.0**e * float(c(0.5))
    return CheegerReport(d_N, float(np.min(q1)), arg, N, half)


def poly_concentration(d: float, N: float, r):
    """Concentration bound ((1/2)^{1/N} - r d / N)_+^N implied by an N-dim Cheeger constant d."""
    r = np.asarray(r, dtype=float)
    if not d > 0:
        raise CddError("bad-params", "Cheeger constant must be positive")
    if 0 <= N < 1:
        raise CddError("bad-params", "N must lie in (-inf, 0) or [1, inf]")
    if math.isinf(N):
        out = 0.5 * np.exp(-r * d)
    else:
        base = 0.5 ** (1.0 / N) - r * d / N
        with np.errstate(divide="ignore"):
            out = np.where(base > 0, np.abs(base) ** N, 0.0 if N > 0 else INF)
    return float(out) if out.ndim == 0 else out


@dataclass
class ConcentrationCurve:
    r: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.K = np.asarray(self.K, dtype=float)
        if self.r.ndim != 1 or self.r.shape != self.K.shape or self.r.size < 1:
            raise CddError("bad-curve", "r and K must be matching 1D arrays")
        if np.any(np.diff(self.r) <= 0) or self.r[0] < 0:
            raise CddError("bad-curve", "r-grid must be nonnegative and strictly increasing")
        if np.any(self.K < 0) or np.any(self.K > 0.5):
            raise CddError("bad-curve", "K must take values in [0, 1/2]")
        if np.any(np.diff(self.K) > 0):
            raise CddError("bad-curve", "K must be non-increasing")
        if self.r[0] == 0 and self.K[0] != 0.5:
            raise CddError("bad-curve", "K(0) must be 1/2")

    def to_dict(self) -> dict:
        return {"points": [{"r": float(a), "K": float(b)} for a, b in zip(self.r, self.K)]}


def concentration_to_cheeger(K: ConcentrationCurve, N: float) -> float:
    """sup over r > 0 of 2^{(N-1)/N} (1/2 - K(r)) / r on the curve's grid."""
    e = _dim_exponent(N)
    pos = K.r > 0
    if not pos.any():
        return 0.0
    return float(2.0**e * np.max((0.5 - K.K[pos]) / K.r[pos]))


def ball_certificate(R: float, N: float) -> float:
    """Cheeger lower bound 2^{(N-1)/N} / (8 R) from a ball of radius R holding mass >= 3/4."""
    if not R > 0:
        raise CddError("bad-params", "radius must be positive")
    return 2.0 ** _dim_exponent(N) / (8.0 * R)


def profile_curve_of(wd: WeightedDensity1D, v_grid, params=None, method="flat") -> ProfileCurve:
    """Flat profile of a normalized 1D density sampled on v_grid."""
    v = np.asarray(v_grid, dtype=float)
    return ProfileCurve(v, np.atleast_1d(flat_profile(wd, v)), params or {}, method)


# ---------------------------------------------------------------------------
# Lorentz quasi-norms of step functions


def lorentz_norm(values, weights, alpha: float, r: float) -> float:
    """L^{alpha,r} quasi-norm of a step function taking ``values`` with probabilities ``weights``.

    Normalized so that an indicator of mass m has norm m^{1/alpha}; exact for step functions.
    """
    a = np.abs(np.asarray(values, dtype=float)).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if a.shape != w.shape or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise CddError("bad-weights", "weights must be nonnegative probabilities matching values")
    if not alpha > 0 or not r > 0:
        raise CddError("bad-params", "alpha and r must be positive")
    levels = np.unique(a[a > 0])[::-1]
    if levels.size == 0:
        return 0.0
    # mass of {|f| >= level}
    mass = np.array([w[a >= t].sum() for t in levels])
    if math.isinf(r):
        return float(np.max(levels * mass ** (1.0 / alpha)))
    lower = np.concatenate([levels[1:], [0.0]])
    total = np.sum(mass ** (r / alpha) * (levels**r - lower**r))
    return float(total ** (1.0 / r))


# ---------------------------------------------------------------------------
# weak Sobolev, Nash and Gagliardo constants (N < 0)


@dataclass
class SobolevBound:
    C_pq: float
    gagliardo: float
    p: float
    q: float
    N: float
    hypothesis: str = "CD(0,N), N < 0, med f = 0"

    def to_dict(self) -> dict:
        return asdict(self)


def _check_negative_N(N: float):
    if not (math.isfinite(N) and N < 0):
        raise CddError("bad-params", "these constants need N < 0")


def sobolev_constants(p: float, q: float, N: float, d: float) -> SobolevBound:
    """Bound on the weak L^p-L^q Sobolev constant from the N-dim Cheeger constant d."""
    _check_negative_N(N)
    if not d > 0:
        raise CddError("bad-params", "Cheeger constant must be positive")
    if not (N / (N - 1.0) - 1e-12 <= p <= -N + 1e-12):
        raise CddError("bad-exponents", f"p={p} outside [N/(N-1), -N]")
    if not math.isclose(1.0 / q, 1.0 / p + 1.0 / N, rel_tol=1e-12, abs_tol=1e-12):
        raise CddError("bad-exponents", "need 1/q = 1/p + 1/N")
    C = 2.0 ** (-1.0 / N) * p * (q / p) ** (1.0 / q) / d
    return SobolevBound(C, d * 2.0 ** (1.0 / N), p, q, N)


def sobolev_transfer(p1: float, q1: float, C1: float, p2: float, q2: float, N: float) -> float:
    """Bound on C_{p2,q2} from a known weak Sobolev constant C_{p1,q1}."""
    _check_negative_N(N)
    for p, q in ((p1, q1), (p2, q2)):
        if not (p > 0 and q > 0) or 1.0 / q > 1.0 / p + 1.0 / N + 1e-12:
            raise CddError("bad-exponents", f"(p, q) = ({p}, {q}) violates 1/q <= 1/p + 1/N")
    base = 1.0 + p2 / N
    if not base > 0:
        raise CddError("bad-exponents", "need p2 < -N")
    return 2.0 ** (1.0 + 2.0 / p1) * p2 * base ** (-(1.0 / p2 + 1.0 / N)) * C1


@dataclass
class NashConstant:
    coefficient: float
    gradient_exponent: float
    sup_exponent: float
    hypothesis: str = "CD(0,N), N < 0, med f = 0"

    def to_dict(self) -> dict:
        return asdict(self)


def nash_constant(p: float, N: float, d: float) -> NashConstant:
    """||f||_p <= coef ||grad f||_p^{N/(N-p)} ||f||_inf^{-p/(N-p)}."""
    _check_negative_N(N)
    if not p >= 1:
        raise CddError("bad-exponents", "need p >= 1")
    if not d > 0:
        raise CddError("bad-params", "Cheeger constant must be positive")
    g = N / (N - p)
    coef = d ** (-g) * 2.0 ** (-1.0 / (N - p)) * p**g
    return NashConstant(coef, g, -p / (N - p))


# ---------------------------------------------------------------------------
# cosh model of positive curvature, N < 1


def _check_cosh(p: CDParams):
    if not (p.rho > 0 and not p.is_inf and p.N < 1):
        raise CddError("bad-params", "cosh model needs rho > 0 and N < 1")


def cosh_integral(N: float) -> float:
    """int_0^inf cosh(t)^{N-1} dt = B((1-N)/2, 1/2) / 2 for N < 1."""
    if not N < 1:
        raise CddError("bad-params", "integral diverges for N >= 1")
    return 0.5 * float(beta(0.5 * (1.0 - N), 0.5))


def cosh_model_density(p: CDParams) -> ModelDensity:
    _check_cosh(p)
    return named_density("cosh", N=p.N, rho=p.rho)


def cosh_model_cheeger(p: CDParams) -> float:
    """Linear Cheeger constant 2 I(1/2) of the cosh model (attained at v = 1/2)."""
    _check_cosh(p)
    return math.sqrt(p.rho / (1.0 - p.N)) / cosh_integral(p.N)


def cheeger_lower_bound(p: CDParams) -> float:
    """c sqrt(rho) min(1, sqrt(1-N)) with c from the upper integral bracket."""
    _check_cosh(p)
    return CHEEGER_C * math.sqrt(p.rho) * min(1.0, math.sqrt(1.0 - p.N))


def cosh_model_concentration(p: CDParams, r):
    """Exact concentration profile of the cosh model.

    K0(r) = int_{w r}^inf cosh^{N-1} / (2 int_0^inf cosh^{N-1}), w = sqrt(rho/(1-N)),
    written as a regularized incomplete beta function in sech^2.
    """
    _check_cosh(p)
    r = np.asarray(r, dtype=float)
    x = math.sqrt(p.rho / (1.0 - p.N)) * r
    with np.errstate(over="ignore"):
        s2 = 1.0 / np.cosh(np.minimum(x, 700.0)) ** 2
    out = 0.5 * betainc(0.5 * (1.0 - p.N), 0.5, s2)
    return float(out) if out.ndim == 0 else out


def cosh_model_concentration_curve(p: CDParams, r_grid) -> ConcentrationCurve:
    r = np.asarray(r_grid, dtype=float)
    return ConcentrationCurve(r, np.atleast_1d(cosh_model_concentration(p, r)))


@dataclass
class CoshEstimates:
    t: np.ndarray
    lower: np.ndarray  # exp(min(t^2/2, t) / cosh(2)^2)
    value: np.ndarray  # cosh t
    upper: np.ndarray  # exp(min(t^2/2, t))
    violations: int
    bracket: tuple[float, float]


def cosh_estimates(N: float, t) -> CoshEstimates:
    """Check the sandwich for cosh on the t-grid and return the integral bracket for N < 1.

    Comparisons are made in log space so no overflow occurs for large t.
    """
    if not N < 1:
        raise CddError("bad-params", "need N < 1")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise CddError("bad-params", "t must be nonnegative")
    g = np.minimum(0.5 * t * t, t)
    logc = t + np.log1p(np.exp(-2.0 * t)) - math.log(2.0)
    logc = np.where(t < 1.0, np.log(np.cosh(t)), logc)
    lo, hi = SANDWICH_C * g, g
    violations = int(np.sum(lo > logc) + np.sum(logc > hi))
    s = 1.0 - N
    a = math.sqrt(math.pi / 2.0)
    bracket = (max(a / math.sqrt(s), 1.0 / s), a * COSH2 / math.sqrt(s) + COSH2**2 / s)
    with np.errstate(over="ignore"):
        return CoshEstimates(t, np.exp(lo), np.exp(logc), np.exp(hi), violations, bracket)


def two_level_constant(p: CDParams, r_grid=None, margin: float = 1.05) -> float:
    """C with K0(r) <= C exp(-c min(rho r^2, sqrt(rho (1-N)) r)), c = 1/(2 cosh(2)^2).

    C is the largest ratio on a coarse grid times ``margin``; it is logged.
    """
    _check_cosh(p)
    r = np.linspace(0.0, 40.0 / math.sqrt(p.rho), 401) if r_grid is None else np.asarray(r_grid)
    K = cosh_model_concentration(p, r)
    expo = TWO_LEVEL_C * np.minimum(p.rho * r * r, math.sqrt(p.rho * (1.0 - p.N)) * r)
    with np.errstate(divide="ignore", under="ignore"):
        ratio = np.exp(np.log(K) + expo)
    C = margin * float(np.max(ratio))
    log.info("two-level constant for rho=%g N=%g: C=%.6g (c=%.6g)", p.rho, p.N, C, TWO_LEVEL_C)
    return C


def two_level_bound(p: CDParams, r, C: float):
    r = np.asarray(r, dtype=float)
    out = C * np.exp(-TWO_LEVEL_C * np.minimum(p.rho * r * r, math.sqrt(p.rho * (1.0 - p.N)) * r))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Poincare bounds


def poincare_bounds(p: CDParams, d_che_inf: float | None = None) -> dict:
    """Applicable upper bounds on the Poincare constant, each tagged with its hypothesis."""
    out = {}
    N, rho = p.N, p.rho
    if rho > 0 and (N < 0 or N >= 1):
        val = 1.0 / rho if math.isinf(N) else (N - 1.0) / (N * rho)
        out["lichnerowicz"] = {"value": val, "hypothesis": "rho > 0, N in (-inf,0) U [n,inf]"}
    if rho > 0 and not p.is_inf and N < 1:
        val = 4.0 * (1.0 - N) / rho * cosh_integral(N) ** 2
        out["positive_curvature"] = {"value": val, "hypothesis": "rho > 0, N < 1"}
    if math.isfinite(p.D):
        out["diameter"] = {"value": 4.0 * p.D**2, "hypothesis": "CDD(0,N,D), D < inf"}
    if d_che_inf is not None and d_che_inf > 0:
        out["mazya_cheeger"] = {"value": 4.0 / d_che_inf**2, "hypothesis": "linear Cheeger > 0"}
    return out


# ---------------------------------------------------------------------------
# first-moment constant and W1 stability


def fm_bound(d: float, N: float) -> float:
    """2 int_0^inf ((1/2)^{1/N} - r d / N)_+^N dr in closed form.

    Finite for N < -1 and for N >= 1 (including N = inf, where it equals 1/d).
    """
    if not d > 0:
        raise CddError("bad-params", "Cheeger constant must be positive")
    if -1 <= N < 0:
        raise CddError("fm-divergent", "the first moment diverges for N in [-1, 0)")
    if 0 <= N < 1:
        raise CddError("bad-params", "N must lie in (-inf, -1) or [1, inf]")
    if math.isinf(N):
        return 1.0 / d
    a = 0.5 ** (1.0 / N)
    # int (a - r d/N)^N dr = a^{N+1} / ((N+1) d / N) on either range of N
    return 2.0 * a ** (N + 1.0) * N / ((N + 1.0) * d)


def stability_w1(d1: float, N: float, w1: float) -> float:
    """Lower bound 2^{(N-1)/N} / (16 (C_FM + W1)) on the Cheeger constant of a W1-perturbation."""
    if not w1 >= 0:
        raise CddError("bad-params", "W1 distance must be nonnegative")
    if math.isinf(w1):
        return 0.0
    return 2.0 ** _dim_exponent(N) / (16.0 * (fm_bound(d1, N) + w1))
