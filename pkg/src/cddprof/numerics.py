"""Numeric substrate: extended reals, adaptive quadrature, root finding, minimization.

Quadrature works in transformed coordinates.  An algebraic endpoint singularity
``f ~ |t - xi|**kappa`` with ``-1 < kappa < 0`` is removed by ``u = |t - xi|**(1 + kappa)``;
an infinite tail is compactified by ``t = c + L*((1 - s)**-q - 1)`` with ``q`` picked
from the tail's power law.  Divergence is never detected numerically: it is read
off the endpoint descriptors.

All integrands must accept numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .errors import CddError

INF = math.inf

_GL_X, _GL_W = leggauss(10)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# extended reals: floats in [0, +inf] with 1/inf = 0, 1/0 = inf, inf*0 = 0


def recip(x: float) -> float:
    if x == 0.0:
        return INF
    if math.isinf(x):
        return 0.0
    return 1.0 / x


def mul(x: float, y: float) -> float:
    if x == 0.0 or y == 0.0:
        return 0.0
    return x * y


def div(x: float, y: float) -> float:
    return mul(x, recip(y))


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class Endpoint:
    """Analytic behaviour of an integrand at one end of its interval.

    Finite end: ``f ~ |t - xi|**kappa`` with ``xi`` the end itself, or a point ``gap``
    beyond it (a near-singular end, integrated in log coordinates).  Infinite end:
    ``f ~ |t|**power * exp(rate*|t|)``; ``rate=-inf`` marks super-exponential decay.
    ``scale`` is an optional length scale for the tail map.
    """

    kappa: float = 0.0
    rate: float | None = None
    power: float = 0.0
    scale: float | None = None
    gap: float = 0.0
    # optional f(distance to the singular point), avoiding cancellation in t near it
    near: Callable | None = field(default=None, compare=False, repr=False)

    def divergent(self, infinite: bool) -> bool:
        if not infinite:
            return self.kappa <= -1.0 and self.gap == 0.0
        if self.rate is None:
            raise CddError("bad-descriptor", "an infinite end needs a tail rate")
        if self.rate > 0.0:
            return True
        if self.rate == 0.0:
            return self.power >= -1.0
        return False


REGULAR = Endpoint()


@dataclass(frozen=True)
class Quadrature:
    rtol: float = 1e-10
    atol: float = 1e-300
    max_subdivisions: int = 4000


DEFAULT_QUADRATURE = Quadrature()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int


class _Piece:
    """Monotone increasing map t(u) on [u0, u1] covering one sub-interval."""

    def __init__(self, kind: str, lo: float, hi: float, end: Endpoint):
        self.kind = kind
        self.lo, self.hi = lo, hi
        self.near = end.near if kind.startswith("log") else None
        if kind == "linear":
            self.u0, self.u1 = lo, hi
        elif kind in ("sing-left", "sing-right"):
            self.p = 1.0 / (1.0 + end.kappa)
            self.u0, self.u1 = 0.0, (hi - lo) ** (1.0 / self.p)
        elif kind == "log-left":
            self.xi = lo - end.gap
            self.u0, self.u1 = math.log(end.gap), math.log(hi - self.xi)
        elif kind == "log-right":
            self.xi = hi + end.gap
            self.u0, self.u1 = -math.log(self.xi - lo), -math.log(end.gap)
        elif kind in ("tail-left", "tail-right"):
            if end.rate is not None and end.rate < 0.0 and math.isfinite(end.rate):
                self.q = 1.0
                default_scale = 1.0 / -end.rate
            elif end.rate is not None and end.rate < 0.0:
                self.q = 1.0
                default_scale = 1.0
            else:
                self.q = max(1.0, -2.0 / (end.power + 1.0))
                default_scale = max(1.0, abs(lo if kind == "tail-right" else hi))
            self.L = end.scale if end.scale is not None else default_scale
            self.u0, self.u1 = 0.0, 1.0
        else:  # pragma: no cover
            raise ValueError(kind)

    def t(self, u):
        k = self.kind
        if k == "linear":
            return u
        if k == "sing-left":
            return self.lo + u**self.p
        if k == "sing-right":
            return self.hi - (self.u1 - u) ** self.p
        if k == "tail-right":
            return self.lo + self.L * ((1.0 - u) ** -self.q - 1.0)
        if k == "log-left":
            return self.xi + np.exp(u)
        if k == "log-right":
            return self.xi - np.exp(-u)
        return self.hi - self.L * (u**-self.q - 1.0)

    def integrand(self, f, u):
        """f(t(u)) * t'(u)."""
        if self.near is not None:
            d = np.exp(u) if self.kind == "log-left" else np.exp(-u)
            return np.asarray(self.near(d), dtype=float) * d
        return np.asarray(f(self.t(u)), dtype=float) * self.dt(u)

    def dt(self, u):
        k = self.kind
        if k == "linear":
            return np.ones_like(u)
        if k == "sing-left":
            return self.p * u ** (self.p - 1.0)
        if k == "sing-right":
            return self.p * (self.u1 - u) ** (self.p - 1.0)
        if k == "tail-right":
            return self.L * self.q * (1.0 - u) ** (-self.q - 1.0)
        if k == "log-left":
            return np.exp(u)
        if k == "log-right":
            return np.exp(-u)
        return self.L * self.q * u ** (-self.q - 1.0)

    def u(self, t):
        k = self.kind
        t = np.asarray(t, dtype=float)
        if k == "linear":
            return t
        if k == "sing-left":
            return np.clip(t - self.lo, 0.0, None) ** (1.0 / self.p)
        if k == "sing-right":
            return self.u1 - np.clip(self.hi - t, 0.0, None) ** (1.0 / self.p)
        if k == "tail-right":
            return 1.0 - (1.0 + (t - self.lo) / self.L) ** (-1.0 / self.q)
        if k == "log-left":
            return np.log(np.clip(t - self.xi, np.exp(self.u0), None))
        if k == "log-right":
            return -np.log(np.clip(self.xi - t, np.exp(-self.u1), None))
        return (1.0 + (self.hi - t) / self.L) ** (-1.0 / self.q)


def _split_point(lo: float, hi: float) -> float:
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + max(1.0, abs(lo))
    if math.isfinite(hi):
        return hi - max(1.0, abs(hi))
    return 0.0


def _check_descriptors(lo, hi, left: Endpoint, right: Endpoint):
    if not (lo < hi):
        raise CddError("bad-interval", f"need lo < hi, got [{lo}, {hi}]")
    for end, where in ((left, lo), (right, hi)):
        if math.isnan(end.kappa) or math.isnan(end.power):
            raise CddError("bad-descriptor", "nan exponent")
        if math.isfinite(where) and end.rate is not None:
            raise CddError("bad-descriptor", f"tail rate given for finite end {where}")
        if math.isinf(where) and (end.kappa != 0.0 or end.gap != 0.0):
            raise CddError("bad-descriptor", "algebraic exponent given for infinite end")
        if not end.gap >= 0.0:
            raise CddError("bad-descriptor", "gap must be nonnegative")


def _pieces(lo, hi, left: Endpoint, right: Endpoint, breaks: Sequence[float]):
    cuts = sorted({float(b) for b in breaks if lo < b < hi})
    if not cuts:
        cuts = [_split_point(lo, hi)]
    knots = [lo, *cuts, hi]
    pieces = []
    for i in range(len(knots) - 1):
        a, b = knots[i], knots[i + 1]
        if i == 0 and math.isinf(a):
            pieces.append(_Piece("tail-left", a, b, left))
        elif i == 0 and left.gap > 0 and left.kappa < 0:
            pieces.append(_Piece("log-left", a, b, left))
        elif i == 0 and -1.0 < left.kappa < 0.0:
            pieces.append(_Piece("sing-left", a, b, left))
        elif i == len(knots) - 2 and math.isinf(b):
            pieces.append(_Piece("tail-right", a, b, right))
        elif i == len(knots) - 2 and right.gap > 0 and right.kappa < 0:
            pieces.append(_Piece("log-right", a, b, right))
        elif i == len(knots) - 2 and -1.0 < right.kappa < 0.0:
            pieces.append(_Piece("sing-right", a, b, right))
        else:
            pieces.append(_Piece("linear", a, b, REGULAR))
    return pieces


def _gl(piece: _Piece, f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """10-point Gauss-Legendre of the transformed integrand on each [a_i, b_i]."""
    half = 0.5 * (b - a)
    u = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        vals = piece.integrand(f, u)
    vals = np.where((half == 0.0)[:, None], 0.0, vals)  # empty panels, e.g. at a singular end
    bad = ~np.isfinite(vals)
    if bad.any():
        # an overflowed tail map with a vanishing density
        tails = piece.kind.startswith("tail")
        if not tails:
            raise CddError("quadrature-failed", "integrand not finite at an interior node")
        vals = np.where(bad, 0.0, vals)
    return half * (vals @ _GL_W)


class _Panels:
    def __init__(self, pieces, piece_idx, a, b, value):
        self.pieces = pieces
        order = np.lexsort((a, piece_idx))
        self.piece_idx = piece_idx[order]
        self.a = a[order]
        self.b = b[order]
        self.value = value[order]
        self.cum = np.concatenate([[0.0], np.cumsum(self.value)])


def _adaptive(f, pieces, q: Quadrature, relative: bool = False) -> tuple[float, float, _Panels]:
    """Vectorized adaptive Gauss-Legendre over all pieces.

    Default: stop when the summed error estimate meets the global tolerance.  With
    ``relative=True`` every panel must meet the tolerance relative to its own value, so
    every partial sum is accurate relative to itself.
    """
    n0 = 8
    idx = np.repeat(np.arange(len(pieces)), n0)
    a = np.concatenate([np.linspace(p.u0, p.u1, n0 + 1)[:-1] for p in pieces])
    b = np.concatenate([np.linspace(p.u0, p.u1, n0 + 1)[1:] for p in pieces])
    done_idx, done_a, done_b, done_v, done_e = [], [], [], [], []
    total_done, err_done = 0.0, 0.0
    while True:
        whole = np.empty_like(a)
        halves = np.empty_like(a)
        for k, piece in enumerate(pieces):
            m = idx == k
            if not m.any():
                continue
            aa, bb = a[m], b[m]
            mid = 0.5 * (aa + bb)
            whole[m] = _gl(piece, f, aa, bb)
            halves[m] = _gl(piece, f, aa, mid) + _gl(piece, f, mid, bb)
        err = np.abs(whole - halves)
        total = total_done + halves.sum()
        tol = max(q.atol, q.rtol * abs(total))
        n_panels = len(done_a) + a.size
        if relative:
            keep = err <= np.maximum(q.rtol * np.abs(halves), q.atol)
            if keep.all():
                done_idx.append(idx), done_a.append(a), done_b.append(b), done_v.append(halves)
                err_done += err.sum()
                break
        elif err_done + err.sum() <= tol:
            done_idx.append(idx), done_a.append(a), done_b.append(b), done_v.append(halves)
            err_done += err.sum()
            break
        if n_panels > q.max_subdivisions:
            raise CddError(
                "quadrature-failed",
                f"no convergence after {n_panels} panels (err {err_done + err.sum():.3g} > {tol:.3g})",
            )
        if not relative:
            # panels already well below their share are frozen
            keep = err <= tol / (4.0 * max(n_panels, 1))
        done_idx.append(idx[keep]), done_a.append(a[keep]), done_b.append(b[keep])
        done_v.append(halves[keep])
        total_done += halves[keep].sum()
        err_done += err[keep].sum()
        split = ~keep
        mid = 0.5 * (a[split] + b[split])
        idx = np.concatenate([idx[split], idx[split]])
        a, b = np.concatenate([a[split], mid]), np.concatenate([mid, b[split]])
    panels = _Panels(
        pieces,
        np.concatenate(done_idx),
        np.concatenate(done_a),
        np.concatenate(done_b),
        np.concatenate(done_v),
    )
    return float(panels.cum[-1]), float(err_done), panels


def integrate_detailed(
    f: Callable,
    lo: float,
    hi: float,
    left: Endpoint = REGULAR,
    right: Endpoint = REGULAR,
    q: Quadrature = DEFAULT_QUADRATURE,
    breaks: Sequence[float] = (),
) -> QuadResult:
    lo, hi = float(lo), float(hi)
    if lo == hi:
        return QuadResult(0.0, 0.0, 0)
    _check_descriptors(lo, hi, left, right)
    if left.divergent(math.isinf(lo)) or right.divergent(math.isinf(hi)):
        return QuadResult(INF, 0.0, 0)
    value, err, panels = _adaptive(f, _pieces(lo, hi, left, right, breaks), q)
    return QuadResult(value, err, len(panels.value))


def integrate(
    f: Callable,
    lo: float,
    hi: float,
    left: Endpoint = REGULAR,
    right: Endpoint = REGULAR,
    q: Quadrature = DEFAULT_QUADRATURE,
    breaks: Sequence[float] = (),
) -> float:
    """Integral of a nonnegative ``f`` over ``[lo, hi]``; ``inf`` when the descriptors say so."""
    return integrate_detailed(f, lo, hi, left, right, q, breaks).value


class CumulativeTable:
    """Converged quadrature panels kept around for fast cdf / quantile queries."""

    def __init__(
        self,
        f: Callable,
        lo: float,
        hi: float,
        left: Endpoint = REGULAR,
        right: Endpoint = REGULAR,
        q: Quadrature = DEFAULT_QUADRATURE,
        breaks: Sequence[float] = (),
        relative: bool = False,
    ):
        _check_descriptors(lo, hi, left, right)
        if left.divergent(math.isinf(lo)) or right.divergent(math.isinf(hi)):
            raise CddError("infinite-mass", "integrand is not integrable on the interval")
        self.f = f
        self.lo, self.hi = float(lo), float(hi)
        self.total, self.error, self._p = _adaptive(
            f, _pieces(lo, hi, left, right, breaks), q, relative
        )

    def _partial(self, k: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Mass from the start of panel k up to transformed coordinate u."""
        p = self._p
        out = np.empty_like(u)
        for j, piece in enumerate(p.pieces):
            m = p.piece_idx[k] == j
            if m.any():
                out[m] = _gl(piece, self.f, p.a[k[m]], u[m])
        return out

    def cdf(self, t) -> np.ndarray:
        """Unnormalized cumulative mass on ``[lo, t]``."""
        p = self._p
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        piece_of = np.zeros(t.shape, dtype=int)
        for j, piece in enumerate(p.pieces):
            piece_of[t >= piece.lo] = j
        u = np.empty_like(t)
        for j, piece in enumerate(p.pieces):
            m = piece_of == j
            u[m] = piece.u(t[m])
        # panel index: last panel of that piece starting at or before u
        k = np.empty(t.shape, dtype=int)
        for j in range(len(p.pieces)):
            m = piece_of == j
            if m.any():
                sel = np.nonzero(p.piece_idx == j)[0]
                pos = np.searchsorted(p.a[sel], u[m], side="right") - 1
                k[m] = sel[np.clip(pos, 0, sel.size - 1)]
        out = p.cum[k] + self._partial(k, u)
        out[t <= self.lo] = 0.0
        out[t >= self.hi] = self.total
        return out

    def quantile(self, v, iters: int = 100) -> np.ndarray:
        """Points t with cumulative mass ``v * total`` (v in [0, 1]), vectorized."""
        p = self._p
        v = np.atleast_1d(np.asarray(v, dtype=float))
        target = np.clip(v, 0.0, 1.0) * self.total
        k = np.clip(np.searchsorted(p.cum, target, side="right") - 1, 0, p.value.size - 1)
        need = target - p.cum[k]
        lo_u, hi_u = p.a[k].copy(), p.b[k].copy()
        width = np.maximum(p.value[k], 1e-300)
        u = lo_u + (hi_u - lo_u) * np.clip(need / width, 0.0, 1.0)
        # relative to the smaller of the two masses cut off, with a roundoff floor
        mtol = np.maximum(1e-13 * np.minimum(target, self.total - target), 4e-16 * self.total)
        for _ in range(iters):
            resid = self._partial(k, u) - need
            lo_u = np.where(resid < 0, u, lo_u)
            hi_u = np.where(resid > 0, u, hi_u)
            done = (np.abs(resid) <= mtol) | (hi_u - lo_u <= 1e-15 * np.abs(u))
            if done.all():
                break
            g = np.empty_like(u)
            for j, piece in enumerate(p.pieces):
                m = p.piece_idx[k] == j
                if m.any():
                    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                        g[m] = piece.integrand(self.f, u[m])
            with np.errstate(divide="ignore", invalid="ignore"):
                step = u - resid / g
            ok = np.isfinite(step) & (step > lo_u) & (step < hi_u)
            u = np.where(done, u, np.where(ok, step, 0.5 * (lo_u + hi_u)))
        t = np.empty_like(u)
        with np.errstate(divide="ignore", over="ignore"):
            for j, piece in enumerate(p.pieces):
                m = p.piece_idx[k] == j
                t[m] = piece.t(u[m])
        t = np.clip(t, self.lo, self.hi)
        t[v <= 0.0] = self.lo
        t[v >= 1.0] = self.hi
        return t


# ---------------------------------------------------------------------------
# roots and minima


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise CddError("bad-interval", f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")


def find_root(g: Callable[[float], float], bracket, tol: float = 1e-12) -> float:
    b = bracket if isinstance(bracket, Bracket) else Bracket(*bracket)
    glo, ghi = g(b.lo), g(b.hi)
    if glo == 0.0:
        return b.lo
    if ghi == 0.0:
        return b.hi
    if np.sign(glo) == np.sign(ghi):
        raise CddError("no-root-in-bracket", f"g({b.lo})={glo:.3g}, g({b.hi})={ghi:.3g}")
    return float(brentq(g, b.lo, b.hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=1000))


def golden_section(g: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    best_x, best_f = a, g(a)
    fb = g(b)
    if fb < best_f:
        best_x, best_f = b, fb
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = g(x1), g(x2)
    for x, fx in ((x1, f1), (x2, f2)):
        if fx < best_f:
            best_x, best_f = x, fx
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = g(x1)
            if f1 < best_f:
                best_x, best_f = x1, f1
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = g(x2)
            if f2 < best_f:
                best_x, best_f = x2, f2
    return best_x, best_f


def minimize_scalar(
    g: Callable[[float], float], interval, starts: int = 8, tol: float = 1e-10
) -> tuple[float, float]:
    """Multi-start golden section on ``[lo, hi]``: returns ``(argmin, min)``.

    ``g`` is sampled at ``starts + 1`` equispaced points; every discrete local minimum is
    refined by golden section on its two neighbouring cells.
    """
    lo, hi = (float(x) for x in interval)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise CddError("bad-interval", f"cannot minimize over [{lo}, {hi}]")
    if lo == hi:
        return lo, g(lo)
    starts = max(int(starts), 1)
    xs = np.linspace(lo, hi, starts + 1)
    fs = np.array([g(x) for x in xs])
    best = int(np.argmin(fs))
    best_x, best_f = float(xs[best]), float(fs[best])
    for i in range(xs.size):
        left = fs[i - 1] if i > 0 else np.inf
        right = fs[i + 1] if i < xs.size - 1 else np.inf
        if fs[i] <= left and fs[i] <= right:
            a = xs[max(i - 1, 0)]
            b = xs[min(i + 1, xs.size - 1)]
            x, fx = golden_section(g, float(a), float(b), tol * max(1.0, hi - lo))
            if fx < best_f:
                best_x, best_f = x, fx
    return best_x, float(best_f)
