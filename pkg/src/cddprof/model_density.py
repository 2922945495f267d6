"""Extremal Jacobians J_{H,rho,N}, named model families and the 1D CD residual.

For N not in {1, inf} with m = N - 1, delta = rho/m, k = H/m:

    J(t) = ((c_delta(t) + k s_delta(t))_+)^m

truncated to the interval between the first nonpositive and first positive roots
of the base.  Outside that interval J is 0 when m > 0 and +inf when m < 0 (0**m).
N = inf gives exp(H t - rho t^2/2); N = 1 gives 1 when rho = 0 and +inf otherwise.

Everything is evaluated in log space so that huge H does not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import CddError
from .numerics import INF, REGULAR, Endpoint

_ROOT_TOL = 1e-12


@dataclass(frozen=True)
class CDParams:
    rho: float
    N: float
    D: float = INF

    def __post_init__(self):
        for name in ("rho", "N", "D"):
            if math.isnan(getattr(self, name)):
                raise CddError("bad-params", f"{name} is nan")
        if math.isinf(self.rho):
            raise CddError("bad-params", "rho must be finite")
        if self.N == -INF:
            raise CddError("bad-params", "N must lie in (-inf, inf]")
        if not self.D > 0:
            raise CddError("bad-params", "D must be positive")

    @property
    def is_one(self) -> bool:
        return self.N == 1.0

    @property
    def is_inf(self) -> bool:
        return self.N == INF

    @property
    def delta(self) -> float:
        if self.is_one:
            raise CddError("bad-params", "delta undefined at N=1")
        if self.is_inf:
            return 0.0
        return self.rho / (self.N - 1.0)

    @property
    def pathological(self) -> bool:
        return self.is_one and self.rho < 0.0 and math.isfinite(self.D)


@dataclass(frozen=True)
class SupportRoots:
    xi_minus: float
    xi_plus: float


def trig_pair(delta: float, t):
    """(s_delta(t), c_delta(t))."""
    t = np.asarray(t, dtype=float)
    if delta > 0:
        w = math.sqrt(delta)
        return np.sin(w * t) / w, np.cos(w * t)
    if delta < 0:
        w = math.sqrt(-delta)
        return np.sinh(w * t) / w, np.cosh(w * t)
    return t.copy(), np.ones_like(t)


def support_roots(H: float, p: CDParams) -> SupportRoots:
    if p.is_one or p.is_inf:
        return SupportRoots(-INF, INF)
    m = p.N - 1.0
    delta, k = p.rho / m, H / m
    if delta == 0.0:
        if k > 0:
            return SupportRoots(-1.0 / k, INF)
        if k < 0:
            return SupportRoots(-INF, -1.0 / k)
        return SupportRoots(-INF, INF)
    # written with atan2 / w/k so that tiny |delta| neither overflows nor cancels
    w = math.sqrt(abs(delta))
    if delta > 0:
        return SupportRoots(-math.atan2(w, k) / w, math.atan2(w, -k) / w)
    if abs(k) <= w:
        return SupportRoots(-INF, INF)
    t0 = -math.atanh(w / k) / w
    return SupportRoots(t0, INF) if k > 0 else SupportRoots(-INF, t0)


def _log_base_from_root(k: float, delta: float, d):
    """log of the base c + k s at distance d inside the support from a finite root."""
    d = np.asarray(d, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if delta == 0.0:
            return np.log(abs(k) * d)
        w = math.sqrt(abs(delta))
        if delta > 0:
            return math.log(math.hypot(k, w)) + np.log(np.sin(w * d)) - math.log(w)
        ak = abs(k)
        y = w * d
        return (0.5 * math.log((ak - w) * (ak + w)) - math.log(w) + y - math.log(2.0)
                + np.log(-np.expm1(-2.0 * y)))


def log_J_from_root(H: float, p: CDParams, d):
    """log J at distance d inside the support from any finite root (same at every root)."""
    m = p.N - 1.0
    with np.errstate(invalid="ignore"):
        return m * _log_base_from_root(H / m, p.rho / m, d)


def log_J(H: float, p: CDParams, t):
    """log J_{H,rho,N}(t), vectorized; values in [-inf, inf]."""
    t = np.asarray(t, dtype=float)
    if p.is_inf:
        return H * t - 0.5 * p.rho * t * t
    if p.is_one:
        return np.full(t.shape, 0.0 if p.rho == 0.0 else INF)
    m = p.N - 1.0
    delta, k = p.rho / m, H / m
    r = support_roots(H, p)
    inside = (t > r.xi_minus) & (t < r.xi_plus)
    tt = np.where(inside, t, 0.0)
    # distance to the nearest finite root keeps the base free of cancellation there
    d = np.minimum(tt - r.xi_minus, r.xi_plus - tt)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if delta == 0.0:
            lb = np.where(np.abs(k) * d < 0.5, _log_base_from_root(k, delta, d),
                          np.log1p(k * tt))
        elif delta > 0 or abs(k) > math.sqrt(-delta):  # a finite root exists
            lb = _log_base_from_root(k, delta, d)
        else:
            w = math.sqrt(-delta)
            beta = k / w
            x = w * tt
            ax = np.abs(x)
            sg = np.where(x >= 0, 1.0, -1.0)
            A, B = 1.0 + sg * beta, 1.0 - sg * beta
            e = np.exp(-2.0 * ax)
            val = A + B * e
            lb = np.where(val > 0, ax - math.log(2.0) + np.log(np.where(val > 0, val, 1.0)),
                          np.log(np.where(B > 0, B, 1.0)) - ax - math.log(2.0))
            lb = np.where((A == 0) | (val > 0), lb, -INF)
        out = m * lb
    edge = -INF if m > 0 else INF
    bad = ~inside | np.isnan(out)
    out = np.where(t == 0.0, 0.0, out)  # J(0) = 1 exactly
    return np.where(bad, edge, out)


def eval_J(H: float, p: CDParams, t):
    with np.errstate(over="ignore"):
        out = np.exp(log_J(H, p, t))
    return float(out) if np.ndim(out) == 0 else out


def critical_point(H: float, p: CDParams) -> float | None:
    """Interior stationary point of log J, if any."""
    if p.is_one:
        return None
    if p.is_inf:
        return H / p.rho if p.rho != 0.0 else None
    m = p.N - 1.0
    delta, k = p.rho / m, H / m
    if delta == 0.0:
        return None
    w = math.sqrt(abs(delta))
    if delta > 0:
        return math.atan2(k, w) / w
    if abs(k) < w:
        return -math.atanh(k / w) / w
    return None


def _tail(H: float, p: CDParams, side: int) -> Endpoint:
    """Tail descriptor of J at +inf (side=1) or -inf (side=-1)."""
    if p.is_inf:
        if p.rho > 0:
            return Endpoint(rate=-INF, scale=1.0 / math.sqrt(p.rho))
        if p.rho < 0:
            return Endpoint(rate=INF)
        r = side * H
        return Endpoint(rate=r, scale=1.0 / abs(r) if r != 0 else None)
    if p.is_one:
        return Endpoint(rate=0.0) if p.rho == 0.0 else Endpoint(rate=INF)
    m = p.N - 1.0
    delta, k = p.rho / m, H / m
    if delta == 0.0:
        if k == 0.0:
            return Endpoint(rate=0.0)
        return Endpoint(rate=0.0, power=m, scale=1.0 / abs(k))
    w = math.sqrt(-delta)
    beta = k / w
    r = -m * w if side * beta == -1.0 else m * w
    return Endpoint(rate=r, scale=1.0 / abs(r))


def _near(a: float, b: float) -> bool:
    return math.isfinite(a) and math.isfinite(b) and abs(a - b) <= _ROOT_TOL * max(1.0, abs(b))


def integrability(H: float, p: CDParams, interval) -> str:
    """'finite', 'divergent-at-root' or 'divergent-at-infinity' for the mass of J on interval."""
    lo, hi = (float(x) for x in interval)
    if p.is_one and p.rho != 0.0:
        return "divergent-at-infinity"
    r = support_roots(H, p)
    if not (p.is_one or p.is_inf):
        m = p.N - 1.0
        if m < 0:
            if (lo < r.xi_minus and not _near(lo, r.xi_minus)) or (
                hi > r.xi_plus and not _near(hi, r.xi_plus)
            ):
                return "divergent-at-root"
        lo_c, hi_c = max(lo, r.xi_minus), min(hi, r.xi_plus)
        if m <= -1.0 and (_near(lo_c, r.xi_minus) or _near(hi_c, r.xi_plus)):
            return "divergent-at-root"
        lo, hi = lo_c, hi_c
    if math.isinf(hi) and _tail(H, p, 1).divergent(True):
        return "divergent-at-infinity"
    if math.isinf(lo) and _tail(H, p, -1).divergent(True):
        return "divergent-at-infinity"
    return "finite"


# ---------------------------------------------------------------------------
# model densities


FAMILIES = ("jacobian", "cosh", "sinh", "exp", "sin", "power", "uniform", "custom")


class ModelDensity:
    """A symbolic 1D density ``coef * g(t - shift)`` on ``domain``.

    ``m`` is the exponent (N - 1) and ``w`` the frequency / rate of the family:

    cosh: cosh(w x)^m    sinh: sinh(w x)^m    exp: exp(w x)^m
    sin:  sin(w x)^m     power: x^m           uniform: 1
    jacobian: J_{H,rho,N}(x)                  custom: user callable
    """

    def __init__(
        self,
        family: str,
        domain=(-INF, INF),
        *,
        m: float = 0.0,
        w: float = 1.0,
        shift: float = 0.0,
        coef: float = 1.0,
        H: float = 0.0,
        params: CDParams | None = None,
        func: Callable | None = None,
        endpoints: tuple[Endpoint, Endpoint] | None = None,
    ):
        if family not in FAMILIES:
            raise CddError("bad-family-params", f"unknown family {family!r}")
        self.family = family
        self.m, self.w, self.shift, self.coef = float(m), float(w), float(shift), float(coef)
        self.H, self.params = float(H), params
        self._func = func
        self._endpoints = endpoints
        lo, hi = (float(x) for x in domain)
        if family == "jacobian":
            if params is None:
                raise CddError("bad-family-params", "jacobian family needs CDParams")
            r = support_roots(self.H, params)
            if params.N > 1 or params.is_inf:
                lo, hi = max(lo, r.xi_minus + shift), min(hi, r.xi_plus + shift)
        if not lo < hi:
            raise CddError("bad-family-params", f"empty domain [{lo}, {hi}]")
        if coef <= 0:
            raise CddError("bad-family-params", "coef must be positive")
        if family in ("cosh", "sinh", "sin") and not w > 0:
            raise CddError("bad-family-params", "frequency w must be positive")
        if family in ("sinh", "power") and lo < shift:
            raise CddError("bad-family-params", f"{family} needs domain inside [shift, inf)")
        if family == "sin" and (lo < shift or hi > shift + math.pi / w * (1 + 1e-15)):
            raise CddError("bad-family-params", "sin needs domain inside [shift, shift + pi/w]")
        if family == "custom" and func is None:
            raise CddError("bad-family-params", "custom family needs func")
        if family == "custom" and endpoints is None and not (math.isfinite(lo) and math.isfinite(hi)):
            raise CddError("bad-family-params", "custom family on an unbounded domain needs endpoints")
        self.domain = (lo, hi)

    def __repr__(self):
        return f"ModelDensity({self.family!r}, domain={self.domain}, m={self.m}, w={self.w}, shift={self.shift})"

    # evaluation ----------------------------------------------------------

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        x = t - self.shift
        f = self.family
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if f == "jacobian":
                out = log_J(self.H, self.params, x)
            elif f == "cosh":
                ax = np.abs(self.w * x)
                out = self.m * (ax + np.log1p(np.exp(-2 * ax)) - math.log(2.0))
            elif f == "sinh":
                ax = self.w * x
                out = self.m * (ax + np.log(-np.expm1(-2 * ax)) - math.log(2.0))
            elif f == "exp":
                out = self.m * self.w * x
            elif f == "sin":
                out = self.m * np.log(np.sin(self.w * x))
            elif f == "power":
                out = self.m * np.log(x)
            elif f == "uniform":
                out = np.zeros_like(x)
            else:
                out = np.log(np.asarray(self._func(t), dtype=float))
            out = out + math.log(self.coef)
        if f != "custom":
            # 0**m at a boundary zero of the base
            out = np.where(np.isnan(out), -INF if self.m > 0 else INF, out)
        return out

    def __call__(self, t):
        with np.errstate(over="ignore"):
            out = np.exp(self.log_value(t))
        return float(out) if np.ndim(out) == 0 else out

    def log_derivatives(self, t):
        """Closed-form ((log f)', (log f)'') for named families; None for custom."""
        t = np.asarray(t, dtype=float)
        x = t - self.shift
        m, w, f = self.m, self.w, self.family
        if f == "cosh":
            th = np.tanh(w * x)
            return m * w * th, m * w * w * (1 - th * th)
        if f == "sinh":
            return m * w / np.tanh(w * x), -m * w * w / np.sinh(w * x) ** 2
        if f == "exp":
            return np.full_like(x, m * w), np.zeros_like(x)
        if f == "sin":
            return m * w / np.tan(w * x), -m * w * w / np.sin(w * x) ** 2
        if f == "power":
            return m / x, -m / (x * x)
        if f == "uniform":
            return np.zeros_like(x), np.zeros_like(x)
        if f == "jacobian":
            p, H = self.params, self.H
            if p.is_inf:
                return H - p.rho * x, np.full_like(x, -p.rho)
            if p.is_one:
                return np.zeros_like(x), np.zeros_like(x)
            mm = p.N - 1.0
            delta, k = p.rho / mm, H / mm
            s, c = trig_pair(delta, x)
            g = (k * c - delta * s) / (c + k * s)
            return mm * g, mm * (-delta - g * g)
        return None

    # analytic structure --------------------------------------------------

    def breaks(self) -> list[float]:
        lo, hi = self.domain
        pts = []
        if self.family == "jacobian":
            cp = critical_point(self.H, self.params)
            if cp is not None:
                pts.append(cp + self.shift)
        elif self.family in ("cosh",):
            pts.append(self.shift)
        elif self.family == "sin":
            pts.append(self.shift + math.pi / (2 * self.w))
        return [x for x in pts if lo < x < hi]

    def endpoints(self) -> tuple[Endpoint, Endpoint]:
        """Singularity / tail descriptors at the two ends of the domain."""
        if self._endpoints is not None:
            return self._endpoints
        lo, hi = self.domain
        return self._end(lo, -1), self._end(hi, 1)

    def _end(self, x: float, side: int) -> Endpoint:
        f, m, w = self.family, self.m, self.w
        if math.isinf(x):
            if f == "cosh":
                return Endpoint(rate=m * w, scale=1.0 / w)
            if f == "sinh":
                return Endpoint(rate=m * w, scale=1.0 / w)
            if f == "exp":
                r = side * m * w
                return Endpoint(rate=r, scale=1.0 / abs(r) if r else None)
            if f == "power":
                return Endpoint(rate=0.0, power=m, scale=max(1.0, abs(self.shift)))
            if f == "uniform":
                return Endpoint(rate=0.0)
            if f == "jacobian":
                return _tail(self.H, self.params, side)
            return Endpoint(rate=0.0)
        xs = x - self.shift
        if f in ("sinh", "power"):
            zeros, kappa = (0.0,), m
        elif f == "sin":
            zeros, kappa = (0.0, math.pi / w), m
        elif f == "jacobian" and not (self.params.is_one or self.params.is_inf):
            r = support_roots(self.H, self.params)
            zeros, kappa = (r.xi_minus, r.xi_plus), self.params.N - 1.0
        else:
            return REGULAR
        zeros = [z for z in zeros if math.isfinite(z)]
        if any(_near(xs, z) for z in zeros):
            return Endpoint(kappa=kappa)
        if kappa < 0:
            # a blow-up just outside the domain is integrated in log coordinates
            lo, hi = self.domain
            reach = hi - lo if math.isfinite(hi - lo) else 1.0 + abs(x)
            gaps = [side * (z - xs) for z in zeros if 0 < side * (z - xs) <= reach]
            if gaps:
                return Endpoint(kappa=kappa, gap=min(gaps))
        return REGULAR

    def log_near(self, d):
        """log f at distance d from a zero of the base (the same at every zero)."""
        d = np.asarray(d, dtype=float)
        f, m, w = self.family, self.m, self.w
        with np.errstate(divide="ignore", invalid="ignore"):
            if f == "jacobian":
                out = log_J_from_root(self.H, self.params, d)
            elif f == "sinh":
                out = m * (w * d + np.log(-np.expm1(-2 * w * d)) - math.log(2.0))
            elif f == "sin":
                out = m * np.log(np.sin(w * d))
            elif f == "power":
                out = m * np.log(d)
            else:
                raise CddError("bad-family", f"family {f} has no zeros")
        return out + math.log(self.coef)

    def scaled_endpoints(self, M: float = 0.0) -> tuple[Endpoint, Endpoint]:
        """Endpoints for the integrand exp(log f - M), with near-zero evaluators attached."""
        ends = []
        for e in self.endpoints():
            if e.gap > 0 and self.family != "custom":
                e = replace(e, near=lambda d: np.exp(self.log_near(d) - M))
            ends.append(e)
        return tuple(ends)

    def with_domain(self, domain) -> "ModelDensity":
        return ModelDensity(
            self.family, domain, m=self.m, w=self.w, shift=self.shift, coef=self.coef,
            H=self.H, params=self.params, func=self._func, endpoints=self._endpoints,
        )


def _exponent(params: dict) -> float:
    if "m" in params:
        return float(params["m"])
    if "N" in params:
        N = float(params["N"])
        if not math.isfinite(N) or N == 1.0:
            raise CddError("bad-family-params", "family exponent needs finite N != 1")
        return N - 1.0
    raise CddError("bad-family-params", "give N or m")


def _frequency(params: dict, m: float, hyperbolic: bool) -> float:
    if "w" in params:
        return float(params["w"])
    if "delta" in params:
        delta = float(params["delta"])
    elif "rho" in params:
        delta = float(params["rho"]) / m
    else:
        return 1.0
    if hyperbolic and delta >= 0:
        raise CddError("bad-family-params", f"hyperbolic family needs delta < 0, got {delta}")
    if not hyperbolic and delta <= 0:
        raise CddError("bad-family-params", f"sin family needs delta > 0, got {delta}")
    return math.sqrt(abs(delta))


def named_density(family: str, domain=None, **params) -> ModelDensity:
    """Build a model density from natural parameters.

    Accepts ``N`` (or exponent ``m``), curvature via ``rho``/``delta`` (or ``w``), ``shift``, ``coef``.
    The jacobian family takes ``H``, ``rho``, ``N``.
    """
    shift = float(params.get("shift", 0.0))
    coef = float(params.get("coef", 1.0))
    if family == "jacobian":
        p = CDParams(float(params.get("rho", 0.0)), float(params["N"]))
        dom = domain if domain is not None else (-INF, INF)
        return ModelDensity("jacobian", dom, H=float(params.get("H", 0.0)), params=p,
                            shift=shift, coef=coef)
    if family == "uniform":
        dom = domain if domain is not None else (0.0, float(params.get("D", 1.0)))
        return ModelDensity("uniform", dom, coef=coef)
    if family == "custom":
        return ModelDensity("custom", domain, func=params["func"], coef=coef,
                            endpoints=params.get("endpoints"))
    if family not in FAMILIES:
        raise CddError("bad-family-params", f"unknown family {family!r}")
    m = _exponent(params)
    if family == "power":
        dom = domain if domain is not None else (shift, INF)
        return ModelDensity("power", dom, m=m, shift=shift, coef=coef)
    w = _frequency(params, m, hyperbolic=family in ("cosh", "sinh", "exp"))
    if family == "sin":
        dom = domain if domain is not None else (shift, shift + math.pi / w)
    elif family == "sinh":
        dom = domain if domain is not None else (shift, INF)
    else:
        dom = domain if domain is not None else (-INF, INF)
    return ModelDensity(family, dom, m=m, w=w, shift=shift, coef=coef)


def cd1d_residual(f: ModelDensity, p: CDParams, t):
    """-(log f)'' - ((log f)')^2/(N-1) - rho at t (the N=inf form drops the square term)."""
    t = np.asarray(t, dtype=float)
    lo, hi = f.domain
    if np.any((t <= lo) | (t >= hi)):
        raise CddError("outside-domain", "residual needs interior points")
    lv = f.log_value(t)
    if np.any(~np.isfinite(lv)):
        raise CddError("outside-domain", "density vanishes or blows up at t")
    if p.is_one:
        raise CddError("bad-params", "the 1D condition needs N != 1")
    d = f.log_derivatives(t)
    if d is None:
        h = np.maximum(1e-5, 1e-5 * np.abs(t))
        if np.any((t - h <= lo) | (t + h >= hi)):
            raise CddError("outside-domain", "finite-difference stencil leaves the domain")
        lp, lm = f.log_value(t + h), f.log_value(t - h)
        d1 = (lp - lm) / (2 * h)
        d2 = (lp - 2 * lv + lm) / (h * h)
    else:
        d1, d2 = d
    if p.is_inf:
        out = -d2 - p.rho
    else:
        out = -(d2 + d1 * d1 / (p.N - 1.0)) - p.rho
    return float(out) if np.ndim(out) == 0 else out
