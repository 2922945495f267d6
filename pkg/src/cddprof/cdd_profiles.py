"""The Gromov-Levy and flat variational profiles built from the model Jacobians.

    GL(v)   = inf over splits (a, b) and H of  max(v / int_{-a}^0 J_H, (1-v) / int_0^b J_H)
    Flat(v) = inf over splits and finite-mass H of  the half-line profile of J_H on [-a, b]

with the conventions GL(0) = GL(1) = 0 and "inf over no H" = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erf, erfcx

from .errors import CddError
from .model_density import (
    CDParams,
    ModelDensity,
    integrability,
    log_J,
    named_density,
    support_roots,
    trig_pair,
)
from .numerics import INF, CumulativeTable, find_root, integrate
from .profile1d import ProfileCurve, WeightedDensity1D, _log_scale, flat_profile

H_CAP = 1e12
_GRID_PER_SIGN = 65


@dataclass(frozen=True)
class DiameterSplit:
    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or math.isnan(self.a) or math.isnan(self.b):
            raise CddError("bad-split", f"split needs a, b >= 0, got ({self.a}, {self.b})")
        if math.isinf(self.a) != math.isinf(self.b):
            raise CddError("bad-split", "a and b are both finite or both infinite")

    @classmethod
    def for_diameter(cls, D: float, a: float | None = None) -> "DiameterSplit":
        if math.isinf(D):
            return cls(INF, INF)
        a = 0.5 * D if a is None else a
        if not 0 <= a <= D:
            raise CddError("bad-split", f"a={a} outside [0, {D}]")
        return cls(a, D - a)


@dataclass(frozen=True)
class HalfMasses:
    left: float
    right: float


# ---------------------------------------------------------------------------
# masses


def _log_diff_exp(A, B):
    """log(exp(max) - exp(min)) for A, B possibly -inf."""
    hi, lo = max(A, B), min(A, B)
    if hi == -INF:
        return -INF
    if hi == lo:
        return -INF
    return hi + math.log(-math.expm1(lo - hi))


def _log_gauss_mass(H: float, rho: float, lo: float, hi: float) -> float:
    """log of int_lo^hi exp(H t - rho t^2 / 2) dt for rho > 0."""
    mu = H / rho
    c = math.sqrt(rho / 2.0)
    z1, z2 = c * (lo - mu), c * (hi - mu)
    base = H * H / (2 * rho) + 0.5 * math.log(math.pi / (2 * rho))
    if z1 >= 0:
        # erfc(z1) - erfc(z2) = erfcx(z1) e^{-z1^2} - erfcx(z2) e^{-z2^2}
        a = math.log(erfcx(z1)) - z1 * z1
        b = math.log(erfcx(z2)) - z2 * z2 if math.isfinite(z2) else -INF
        return base + _log_diff_exp(a, b)
    if z2 <= 0:
        a = math.log(erfcx(-z2)) - z2 * z2
        b = math.log(erfcx(-z1)) - z1 * z1 if math.isfinite(z1) else -INF
        return base + _log_diff_exp(a, b)
    return base + math.log(float(erf(z2)) - float(erf(z1)))


def log_mass(H: float, p: CDParams, lo: float, hi: float) -> float:
    """log of int_lo^hi J_{H,rho,N}; -inf for an empty interval, +inf when divergent."""
    if lo >= hi:
        return -INF
    if p.is_one:
        if p.rho != 0.0 or math.isinf(hi - lo):
            return INF
        return math.log(hi - lo)
    if integrability(H, p, (lo, hi)) != "finite":
        return INF
    if p.is_inf:
        if p.rho > 0:
            return _log_gauss_mass(H, p.rho, lo, hi)
        if p.rho == 0:
            if H == 0:
                return math.log(hi - lo)
            A, B = H * lo, H * hi
            return _log_diff_exp(A, B) - math.log(abs(H))
    r = support_roots(H, p)
    lo, hi = max(lo, r.xi_minus), min(hi, r.xi_plus)
    if lo >= hi:
        return -INF
    if not p.is_inf and p.rho == 0.0:
        m = p.N - 1.0
        k = H / m
        if k == 0:
            return math.log(hi - lo)
        with np.errstate(divide="ignore"):
            la, lb = float(np.log1p(k * lo)), float(np.log1p(k * hi))
        if m == -1.0:
            return math.log(abs(lb - la)) - math.log(abs(k))
        A, B = (m + 1) * la, (m + 1) * lb
        return _log_diff_exp(A, B) - math.log(abs(k * (m + 1)))
    f = ModelDensity("jacobian", (lo, hi), H=H, params=p)
    M = _log_scale(f, lo, hi)
    val = integrate(lambda t: np.exp(f.log_value(t) - M), lo, hi, *f.scaled_endpoints(M),
                    breaks=f.breaks())
    if val == 0:
        return -INF
    return M + math.log(val)


def _log_half_masses(H: float, p: CDParams, split: DiameterSplit) -> tuple[float, float]:
    return log_mass(H, p, -split.a, 0.0), log_mass(H, p, 0.0, split.b)


def half_masses(H: float, p: CDParams, split: DiameterSplit) -> HalfMasses:
    la, lb = _log_half_masses(H, p, split)
    with np.errstate(over="ignore"):
        return HalfMasses(float(np.exp(la)), float(np.exp(lb)))


# ---------------------------------------------------------------------------
# analytic bookkeeping


def _root_limited(p: CDParams) -> bool:
    return not (p.is_one or p.is_inf) and p.N < 1.0


def finite_mass_exists(p: CDParams, lo: float | None = None, hi: float | None = None) -> bool:
    """Does some H give finite mass on [lo, hi] (default: the full diameter window)?"""
    if lo is None:
        lo, hi = (-INF, INF) if math.isinf(p.D) else (-0.5 * p.D, 0.5 * p.D)
    bounded = math.isfinite(lo) and math.isfinite(hi)
    if p.is_one:
        return p.rho == 0.0 and bounded
    if p.is_inf:
        return bounded or p.rho > 0
    m, delta = p.N - 1.0, p.rho / (p.N - 1.0)
    if m > 0:
        return bounded or delta > 0
    if not bounded:
        return delta < 0
    if delta > 0:
        span = math.pi / math.sqrt(delta)
        return hi - lo < span or (hi - lo == span and m > -1)
    return True


def _both_halves_infinite_exists(p: CDParams) -> bool:
    """Is there a split and an H with infinite mass on both sides of 0?"""
    if p.is_one:
        return p.rho != 0.0 or math.isinf(p.D)
    if p.is_inf:
        return math.isinf(p.D) and p.rho <= 0
    m, delta = p.N - 1.0, p.rho / (p.N - 1.0)
    if m > 0:
        return math.isinf(p.D) and delta <= 0
    if delta > 0:
        span = math.pi / math.sqrt(delta)
        return p.D > span or (p.D == span and m <= -1)
    return math.isinf(p.D) and delta == 0


def finite_H_range(p: CDParams, lo: float, hi: float) -> tuple[float, float] | None:
    """Open H-interval giving finite mass on [lo, hi] (lo <= 0 <= hi), or None if empty."""
    if not finite_mass_exists(p, lo, hi):
        return None
    if p.is_one or p.is_inf or p.N > 1.0:
        return (-INF, INF)
    m, delta = p.N - 1.0, p.rho / (p.N - 1.0)
    if math.isinf(lo) or math.isinf(hi):
        w = math.sqrt(-delta)
        return (m * w, -m * w)
    Hr, Hl = INF, -INF
    if hi > 0:
        s, c = trig_pair(delta, hi)
        Hr = float(-m * c / s)
    if lo < 0:
        s, c = trig_pair(delta, lo)
        Hl = float(-m * c / s)
    return (Hl, Hr) if Hl < Hr else None


def _H_grid(rng: tuple[float, float], scale: float, per_sign: int = _GRID_PER_SIGN) -> np.ndarray:
    lo, hi = rng
    mags = np.logspace(-4, 4, per_sign) / scale
    pts = [0.0, *mags, *(-mags)]
    for b in (lo, hi):
        if math.isfinite(b) and b != 0:
            pts.extend(b - math.copysign(abs(b), b) * np.logspace(-10, -0.3, 24))
    g = np.unique(np.asarray(pts))
    return g[(g > lo) & (g < hi)]


def _minimize_on_grid(fn: Callable[[float], float], grid: np.ndarray, values: np.ndarray,
                      tol: float = 1e-6) -> float:
    """Bounded Brent refinement around the two best grid points; returns the best value seen.

    The value error is quadratic in the location error, so a loose x tolerance suffices.
    """
    best = float(np.min(values))
    if not np.isfinite(best) and best > 0:
        return best
    order = np.argsort(values, kind="stable")
    for idx in order[:2]:
        i = int(idx)
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, grid.size - 1)]
        if a == b:
            continue
        res = minimize_scalar(fn, bounds=(float(a), float(b)), method="bounded",
                              options={"xatol": tol * max(1e-12, float(b - a))})
        best = min(best, float(res.fun))
    return best


# ---------------------------------------------------------------------------
# equal-value H and the Gromov-Levy profile


def equal_value_H(p: CDParams, split: DiameterSplit, v: float) -> float | None:
    """H0 with v / left(H0) = (1 - v) / right(H0); None when some H makes both halves infinite."""
    if p.is_one:
        raise CddError("bad-params", "N = 1 is handled by the caller")
    if not 0 < v < 1:
        raise CddError("bad-params", "v must lie in (0, 1)")
    if split.a == 0 or split.b == 0:
        raise CddError("no-crossing", "one half of the split is empty")

    def psi(H):
        la, lb = _log_half_masses(H, p, split)
        if la == INF and lb == INF:
            raise _BothInfinite
        return (math.log(v) + lb) - (math.log1p(-v) + la)

    def clipped(H):
        x = psi(H)
        return max(min(x, 1e300), -1e300)

    try:
        lo, hi = -1.0, 1.0
        while clipped(lo) > 0:
            lo *= 2
            if -lo > H_CAP:
                raise CddError("no-crossing", "left half outweighs for all H in range")
        while clipped(hi) < 0:
            hi *= 2
            if hi > H_CAP:
                raise CddError("no-crossing", "right half outweighs for all H in range")
        return find_root(clipped, (lo, hi), tol=1e-13 * max(1.0, abs(lo), abs(hi)))
    except _BothInfinite:
        return None


class _BothInfinite(Exception):
    pass


def _split_value(H: float, p: CDParams, split: DiameterSplit, v: float) -> float:
    la, lb = _log_half_masses(H, p, split)
    with np.errstate(over="ignore", divide="ignore"):
        return max(v * math.exp(-la) if la > -INF else INF,
                   (1 - v) * math.exp(-lb) if lb > -INF else INF)


def _gl_split(p: CDParams, split: DiameterSplit, v: float) -> float:
    if split.a == 0 or split.b == 0:
        return INF
    try:
        H0 = equal_value_H(p, split, v)
    except CddError as e:
        if e.code == "no-crossing":
            return 0.0  # limits of the masses as |H| -> inf
        raise
    if H0 is None:
        return 0.0
    eps = 4e-13 * max(1.0, abs(H0))
    return min(_split_value(h, p, split, v) for h in (H0 - eps, H0, H0 + eps))


class _WindowMasses:
    """Cumulative masses of J_H on both sides of 0 within distance D, in log space."""

    def __init__(self, H: float, p: CDParams):
        D = p.D
        self.p, self.H = p, H
        r = support_roots(H, p)
        self.rooted = _root_limited(p)
        m = p.N - 1.0 if not (p.is_one or p.is_inf) else 0.0
        self.right = self._side(H, p, min(D, r.xi_plus), r.xi_plus < D, m)
        self.left = self._side(-H, p, min(D, -r.xi_minus), -r.xi_minus < D, m)

    def _side(self, H, p, reach, root_inside, m):
        end = reach
        if root_inside and self.rooted and m <= -1:
            # stop short of a nonintegrable root; windows reaching past the cut have
            # (1-v)/R below v/L, and their infimum is the limit term in value()
            end = reach - max(reach * 10.0 ** (40.0 / m), 1e-11 * max(1.0, reach))
        f = ModelDensity("jacobian", (0.0, end), H=H, params=p)
        M = _log_scale(f, 0.0, end)
        tab = CumulativeTable(lambda t: np.exp(f.log_value(t) - M), 0.0, end, *f.scaled_endpoints(M),
                              breaks=f.breaks(), relative=True)
        return {"end": end, "M": M, "tab": tab, "root": root_inside, "f": f}

    def log_side(self, side, x):
        """log of int_0^x J on the given side (x >= 0, vectorized)."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, side["end"])
        with np.errstate(divide="ignore"):
            return side["M"] + np.log(side["tab"].cdf(x))

    def log_rate(self, side, x):
        """J(x) / int_0^x J on the given side."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, side["end"])
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.exp(side["f"].log_value(x) - self.log_side(side, x))

    def value(self, v: np.ndarray) -> np.ndarray:
        """inf over splits a in [0, D] of max(v/L, (1-v)/R) for every v."""
        D = self.p.D
        Lr, Rr = self.left, self.right
        # window [u, u + D] with u = -a; finite masses need u >= -left_end, u + D <= right_end
        u_lo = -min(D, Lr["end"]) if self.rooted else -D
        u_hi = min(0.0, Rr["end"] - D) if self.rooted else 0.0
        if u_lo > u_hi:
            return np.zeros_like(v)
        logit = np.log(v) - np.log1p(-v)

        def g(u):
            return self.log_side(Lr, -u) - self.log_side(Rr, u + D) - logit

        def dg(u):
            return -self.log_rate(Lr, -u) - self.log_rate(Rr, u + D)

        a = np.full_like(v, u_lo)
        b = np.full_like(v, u_hi)
        ga, gb = g(a), g(b)
        # g is non-increasing in u: safeguarded Newton inside the sign change
        cross = (ga >= 0) & (gb <= 0)
        u = 0.5 * (a + b)
        for _ in range(100):
            gu = g(u)
            a = np.where(gu >= 0, u, a)
            b = np.where(gu < 0, u, b)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = u - gu / dg(u)
            bad = ~np.isfinite(step) | (step < a) | (step > b)
            new = np.where(bad, 0.5 * (a + b), step)
            done = (gu == 0) | (~bad & (np.abs(step - u) <= 1e-14 * np.maximum(1.0, np.abs(u))))
            u = np.where(cross & (gu != 0), new, u)
            if np.all(done | ~cross) or np.all(b - a <= 1e-15 * np.maximum(1.0, np.abs(a))):
                break
        a = b = u

        def F(u):
            lL, lR = self.log_side(Lr, -u), self.log_side(Rr, u + D)
            with np.errstate(over="ignore"):
                return np.maximum(np.exp(np.log(v) - lL), np.exp(np.log1p(-v) - lR))

        best = np.where(cross, np.minimum(F(a), F(b)), INF)
        # limits from the infinite-mass side of a root-limited end
        if self.rooted and Lr["root"] and -Lr["end"] >= -D:
            with np.errstate(over="ignore"):
                lim = np.exp(np.log1p(-v) - self.log_side(Rr, np.full_like(v, u_lo + D)))
            best = np.minimum(best, lim)
        if self.rooted and Rr["root"] and Rr["end"] <= D:
            with np.errstate(over="ignore"):
                lim = np.exp(np.log(v) - self.log_side(Lr, np.full_like(v, -u_hi)))
            best = np.minimum(best, lim)
        # without a sign change the better endpoint of the finite range wins
        best = np.where(cross, best, np.minimum(best, np.minimum(F(np.full_like(v, u_lo)),
                                                                   F(np.full_like(v, u_hi)))))
        return best


def _gl_window_values(H: float, p: CDParams, v: np.ndarray) -> np.ndarray:
    try:
        return _WindowMasses(H, p).value(v)
    except CddError as e:
        if e.code in ("infinite-mass", "quadrature-failed"):
            return np.full_like(v, INF)
        raise


def _special_value(p: CDParams, v: float, flat: bool) -> float | None:
    """Values fixed by convention, or None when the generic route applies."""
    if p.pathological:
        raise CddError("pathological-case", "N = 1, rho < 0, D < inf has no model space")
    if not 0.0 <= v <= 1.0:
        raise CddError("bad-params", f"v={v} outside [0, 1]")
    # at v in {0, 1} the infimum is reached only as H -> +-inf (model Jacobians vanish at
    # the window end in that limit); pin it instead of reporting a tiny minimizer value
    if v in (0.0, 1.0) and (not flat or not p.is_one):
        return 0.0
    if p.is_one:
        if p.rho == 0.0 and math.isfinite(p.D):
            return 1.0 / p.D
        return 0.0
    return None


def gl_profile(p: CDParams, v):
    """Gromov-Levy profile at v (scalar or array)."""
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.empty_like(vv)
    generic = []
    for i, x in enumerate(vv):
        s = _special_value(p, float(x), flat=False)
        if s is not None:
            out[i] = s
        elif _both_halves_infinite_exists(p):
            out[i] = 0.0
        else:
            generic.append(i)
    if generic:
        idx = np.asarray(generic)
        if math.isinf(p.D):
            split = DiameterSplit(INF, INF)
            out[idx] = [_gl_split(p, split, float(vv[i])) for i in idx]
        else:
            out[idx] = _gl_finite_D(p, vv[idx])
    return float(out[0]) if np.ndim(v) == 0 else out


def _gl_finite_D(p: CDParams, v: np.ndarray) -> np.ndarray:
    # inf over H outside, the split infimum solved exactly inside
    grid = _H_grid((-INF, INF), 1.0 / p.D, per_sign=33)
    table = np.array([_gl_window_values(H, p, v) for H in grid])
    out = np.empty_like(v)
    for j, x in enumerate(v):
        def fn(H, x=x):
            return float(_gl_window_values(H, p, np.array([x]))[0])
        out[j] = _minimize_on_grid(fn, grid, table[:, j])
    return out


# ---------------------------------------------------------------------------
# flat profile


def _flat_values(H: float, p: CDParams, lo: float, hi: float, v: np.ndarray) -> np.ndarray:
    try:
        wd = WeightedDensity1D(ModelDensity("jacobian", (lo, hi), H=H, params=p), (lo, hi))
    except CddError as e:
        if e.code in ("infinite-mass", "zero-mass", "quadrature-failed"):
            return np.full_like(v, INF)
        raise
    return np.atleast_1d(flat_profile(wd, v))


def _flat_window(p: CDParams, lo: float, hi: float, v: np.ndarray) -> np.ndarray:
    rng = finite_H_range(p, lo, hi)
    if rng is None:
        return np.zeros_like(v)
    scale = 1.0 / (hi - lo) if math.isfinite(hi - lo) else 1.0
    grid = _H_grid(rng, scale)
    table = np.array([_flat_values(H, p, lo, hi, v) for H in grid])
    out = np.empty_like(v)
    for j, x in enumerate(v):
        def fn(H, x=x):
            return float(_flat_values(H, p, lo, hi, np.array([x]))[0])
        out[j] = _minimize_on_grid(fn, grid, table[:, j])
    return out


def flat_cdd_profile(p: CDParams, v):
    """Flat profile at v (scalar or array).

    Translating a model Jacobian gives another one, so with H free every placement of a
    length-D window is reached from the centered split; the split a = 0 adds the windows
    truncated at a root (only possible for N > 1).
    """
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.empty_like(vv)
    generic = []
    for i, x in enumerate(vv):
        s = _special_value(p, float(x), flat=True)
        if s is not None:
            out[i] = s
        else:
            generic.append(i)
    if generic:
        idx = np.asarray(generic)
        if math.isinf(p.D):
            out[idx] = _flat_window(p, -INF, INF, vv[idx])
        else:
            D = p.D
            vals = _flat_window(p, -0.5 * D, 0.5 * D, vv[idx])
            if p.is_inf or p.N > 1.0:
                vals = np.minimum(vals, _flat_window(p, 0.0, D, vv[idx]))
            out[idx] = vals
    return float(out[0]) if np.ndim(v) == 0 else out


# ---------------------------------------------------------------------------
# explicit model families


@dataclass
class CaseModel:
    label: str
    family: str
    params: dict
    D: float
    free: str | None = None
    free_range: tuple[float, float] | None = None

    def density(self, x: float | None = None) -> ModelDensity:
        """The model density on its window for free parameter value x."""
        kw = dict(self.params)
        if self.free == "xi":
            dom = (x, x + self.D)
        elif self.free == "H":
            kw["w"] = x
            dom = (0.0, self.D)
        else:
            dom = (0.0, self.D) if math.isfinite(self.D) else (-INF, INF)
        if self.family == "uniform":
            return named_density("uniform", dom)
        return named_density(self.family, dom, **kw)


def case_models(p: CDParams) -> list[CaseModel]:
    N, rho, D = p.N, p.rho, p.D
    if p.is_inf:
        if rho == 0 and math.isfinite(D):
            return [CaseModel("exponential", "exp", {"m": 1.0}, D, "H", (0.0, INF))]
        raise CddError("no-case", "no explicit model family for these parameters")
    if N < 1:
        m = N - 1.0
        delta = rho / m
        if rho > 0 and math.isinf(D):
            return [CaseModel("case 1", "cosh", {"m": m, "delta": delta}, D)]
        if N <= 0 and math.isfinite(D):
            if rho > 0:
                return [
                    CaseModel("case 2 sinh", "sinh", {"m": m, "delta": delta}, D, "xi", (0.0, INF)),
                    CaseModel("case 2 exp", "exp", {"m": m, "delta": delta}, D),
                    CaseModel("case 2 cosh", "cosh", {"m": m, "delta": delta}, D, "xi", (-INF, INF)),
                ]
            if rho == 0:
                return [
                    CaseModel("case 3 power", "power", {"m": m}, D, "xi", (0.0, INF)),
                    CaseModel("case 3 uniform", "uniform", {}, D),
                ]
            span = math.pi / math.sqrt(delta)
            if D < span:
                return [CaseModel("case 4", "sin", {"m": m, "delta": delta}, D, "xi", (0.0, span - D))]
    elif N > 1 and rho == 0 and math.isfinite(D):
        return [CaseModel("power (N > 1)", "power", {"m": N - 1.0}, D, "xi", (0.0, INF))]
    raise CddError("no-case", "no explicit model family for these parameters")


def _free_grid(lo: float, hi: float, D: float) -> np.ndarray:
    if math.isinf(lo) and math.isinf(hi):
        mags = np.logspace(-4, 3, 48) * D
        return np.unique(np.concatenate([-mags, [0.0], mags]))
    if math.isinf(hi):
        return lo + np.logspace(-6, 3, 96) * D
    return np.linspace(lo, hi, 98)[1:-1]


def case_model_profile(p: CDParams, v):
    """Second route to the flat profile: inf over the explicit families of its case."""
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    best = np.full_like(vv, INF)
    for cm in case_models(p):
        if cm.free is None:
            wd = WeightedDensity1D(cm.density())
            best = np.minimum(best, np.atleast_1d(flat_profile(wd, vv)))
            continue
        lo, hi = cm.free_range
        scale = cm.D if math.isfinite(cm.D) else 1.0
        grid = _free_grid(lo, hi, scale)

        def values(x, w=vv):
            try:
                return np.atleast_1d(flat_profile(WeightedDensity1D(cm.density(x)), w))
            except CddError:
                return np.full_like(w, INF)

        table = np.array([values(x) for x in grid])
        for j, x in enumerate(vv):
            fx = _minimize_on_grid(lambda s, x=x: float(values(s, np.array([x]))[0]), grid, table[:, j])
            best[j] = min(best[j], fx)
    return float(best[0]) if np.ndim(v) == 0 else best


# ---------------------------------------------------------------------------
# equality check


def equality_range(p: CDParams) -> bool:
    return math.isinf(p.D) or p.N <= 0 or p.N > 1


def profile_equality_check(p: CDParams, v_grid) -> float:
    """Max relative gap between the two profiles on v_grid (0/0 counts as 0)."""
    if not equality_range(p):
        raise CddError("equality-not-asserted", "equality needs D = inf or N in (-inf, 0] U (1, inf]")
    v = np.asarray(v_grid, dtype=float)
    g = np.atleast_1d(gl_profile(p, v))
    f = np.atleast_1d(flat_cdd_profile(p, v))
    return max_relative_gap(g, f)


def max_relative_gap(g: np.ndarray, f: np.ndarray) -> float:
    out = 0.0
    for a, b in zip(g, f):
        if a == b:
            continue
        if math.isinf(a) or math.isinf(b):
            return INF
        out = max(out, abs(a - b) / max(abs(a), abs(b)))
    return out


def profile_curve(p: CDParams, v_grid, method: str) -> ProfileCurve:
    fn = {"gl": gl_profile, "flat": flat_cdd_profile, "models": case_model_profile}[method]
    v = np.asarray(v_grid, dtype=float)
    return ProfileCurve(v, np.atleast_1d(fn(p, v)), {"rho": p.rho, "N": p.N, "D": p.D}, method)
