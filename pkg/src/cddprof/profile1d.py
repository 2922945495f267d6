"""Normalized 1D measures, the half-line (flat) profile, curve I/O and grid oracles."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CddError
from .model_density import ModelDensity, integrability
from .numerics import DEFAULT_QUADRATURE, INF, REGULAR, CumulativeTable, Endpoint, Quadrature


# ---------------------------------------------------------------------------
# densities


class TabulatedDensity:
    """Piecewise-linear density through ``(t, values)``; mass by the trapezoid rule."""

    family = "tabulated"

    def __init__(self, t: Sequence[float], values: Sequence[float]):
        t = np.asarray(t, dtype=float)
        y = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.shape != y.shape:
            raise CddError("bad-table", "need matching 1D arrays with at least two points")
        if np.any(np.diff(t) <= 0):
            raise CddError("bad-table", "t must be strictly increasing")
        if np.any(~np.isfinite(y)) or np.any(y < 0):
            raise CddError("bad-table", "values must be finite and nonnegative")
        self.t, self.y = t, y
        self.domain = (float(t[0]), float(t[-1]))

    def __call__(self, t):
        out = np.interp(np.asarray(t, dtype=float), self.t, self.y, left=0.0, right=0.0)
        return float(out) if np.ndim(out) == 0 else out

    def log_value(self, t):
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self(t), dtype=float))


class _Reflected:
    """t -> f(-t) on the mirrored domain."""

    def __init__(self, base):
        self.base = base
        self.family = getattr(base, "family", "custom")
        lo, hi = base.domain
        self.domain = (-hi, -lo)

    def log_value(self, t):
        return self.base.log_value(-np.asarray(t, dtype=float))

    def __call__(self, t):
        return self.base(-np.asarray(t, dtype=float))

    def endpoints(self):
        a, b = self.base.endpoints()
        return b, a

    def breaks(self):
        return [-x for x in self.base.breaks()]

    def with_domain(self, domain):
        lo, hi = domain
        return _Reflected(self.base.with_domain((-hi, -lo)))


class _TrapezoidTable:
    """Exact cdf / quantile of a piecewise-linear density."""

    def __init__(self, t, y):
        self.t, self.y = t, y
        self.cum = np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))])
        self.total = float(self.cum[-1])
        self.lo, self.hi = float(t[0]), float(t[-1])

    def cdf(self, x):
        x = np.clip(np.atleast_1d(np.asarray(x, dtype=float)), self.lo, self.hi)
        k = np.clip(np.searchsorted(self.t, x, side="right") - 1, 0, self.t.size - 2)
        d = x - self.t[k]
        slope = (self.y[k + 1] - self.y[k]) / (self.t[k + 1] - self.t[k])
        return self.cum[k] + self.y[k] * d + 0.5 * slope * d * d

    def quantile(self, v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        target = np.clip(v, 0.0, 1.0) * self.total
        k = np.clip(np.searchsorted(self.cum, target, side="right") - 1, 0, self.t.size - 2)
        need = target - self.cum[k]
        h = self.t[k + 1] - self.t[k]
        a = 0.5 * (self.y[k + 1] - self.y[k]) / h
        b = self.y[k]
        # solve a d^2 + b d = need with the cancellation-free root
        disc = np.sqrt(np.maximum(b * b + 4 * a * need, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(b + disc > 0, 2 * need / (b + disc), 0.0)
        return np.clip(self.t[k] + np.clip(d, 0.0, h), self.lo, self.hi)


def _log_scale(density, lo: float, hi: float) -> float:
    """A reference value for log f on [lo, hi] used to keep quadrature in range."""
    pts = [x for x in getattr(density, "breaks", lambda: [])() if lo < x < hi]
    a = lo if math.isfinite(lo) else (min(hi, 0.0) - 10.0 if math.isfinite(hi) else -10.0)
    b = hi if math.isfinite(hi) else max(a, 0.0) + 10.0
    pts.extend(np.linspace(a, b, 33)[1:-1].tolist())
    for end in (lo, hi):
        if math.isfinite(end):
            pts.append(end)
    vals = np.asarray(density.log_value(np.asarray(pts, dtype=float)), dtype=float)
    vals = vals[np.isfinite(vals)]
    return float(vals.max()) if vals.size else 0.0


class WeightedDensity1D:
    """A density restricted to an interval and normalized to a probability measure.

    ``Z`` is the unnormalized mass (``log_Z`` stays finite when ``Z`` overflows).
    Immutable after construction.
    """

    def __init__(self, density, interval=None, q: Quadrature = DEFAULT_QUADRATURE):
        dom = density.domain
        lo, hi = (float(x) for x in (interval if interval is not None else dom))
        if not lo < hi:
            raise CddError("bad-interval", f"empty interval [{lo}, {hi}]")
        if getattr(density, "family", None) == "jacobian":
            cls = integrability(density.H, density.params, (lo - density.shift, hi - density.shift))
            if cls != "finite":
                raise CddError("infinite-mass", cls)
        lo, hi = max(lo, dom[0]), min(hi, dom[1])
        if not lo < hi:
            raise CddError("zero-mass", "interval misses the density's domain")
        self.density = density
        self.interval = (lo, hi)
        if isinstance(density, TabulatedDensity):
            keep = (density.t > lo) & (density.t < hi)
            t = np.concatenate([[lo], density.t[keep], [hi]])
            self._shift = 0.0
            self._table = _TrapezoidTable(t, density(t))
            self._ends = (REGULAR, REGULAR)
        else:
            sub = density.with_domain((lo, hi))
            self._shift = _log_scale(density, lo, hi)
            shift = self._shift
            if hasattr(sub, "scaled_endpoints"):
                self._ends = sub.scaled_endpoints(shift)
            else:
                self._ends = sub.endpoints()

            def scaled(t, _f=density.log_value):
                with np.errstate(over="ignore", invalid="ignore"):
                    return np.exp(_f(t) - shift)

            self._table = CumulativeTable(scaled, lo, hi, *self._ends, q=q, breaks=sub.breaks())
        total = self._table.total
        if total == 0.0 or not math.isfinite(total):
            if total == 0.0:
                raise CddError("zero-mass", "density has zero mass on the interval")
            raise CddError("infinite-mass", "density is not integrable on the interval")
        self.log_Z = self._shift + math.log(total)
        self.Z = math.exp(self.log_Z) if self.log_Z < 709 else INF

    @property
    def ends(self) -> tuple[Endpoint, Endpoint]:
        return self._ends

    def pdf(self, t):
        """Normalized density; the limit 0 at infinite ends, +inf at singular ends."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.interval
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = np.exp(np.asarray(self.density.log_value(t), dtype=float) - self.log_Z)
        out = np.where(np.isinf(t), 0.0, out)
        # at a finite end the descriptor is exact where roundoff in t is not (sin(pi) != 0)
        for end, x in zip(self._ends, (lo, hi)):
            if math.isfinite(x) and end.gap == 0.0 and end.kappa != 0.0:
                out = np.where(t == x, INF if end.kappa < 0 else 0.0, out)
        out = np.where((t < lo) | (t > hi), 0.0, out)
        return out

    def cdf(self, t):
        return self._table.cdf(t) / self._table.total

    def quantile(self, v):
        """Point with cumulative mass v (vectorized)."""
        out = self._table.quantile(v)
        return float(out[0]) if np.ndim(v) == 0 else out

    def reflected(self) -> "WeightedDensity1D":
        lo, hi = self.interval
        if isinstance(self.density, TabulatedDensity):
            d = self.density
            return WeightedDensity1D(TabulatedDensity(-d.t[::-1], d.y[::-1]), (-hi, -lo))
        return WeightedDensity1D(_Reflected(self.density), (-hi, -lo))


def normalize(f, L=None, q: Quadrature = DEFAULT_QUADRATURE) -> WeightedDensity1D:
    return WeightedDensity1D(f, L, q)


def quantile(wd: WeightedDensity1D, v):
    return wd.quantile(v)


def flat_profile(wd: WeightedDensity1D, v):
    """Half-line profile: min of the boundary densities of the left and right half-lines of mass v."""
    v = np.asarray(v, dtype=float)
    vv = np.atleast_1d(v)
    left = wd.pdf(wd.quantile(vv))
    right = wd.pdf(wd.quantile(1.0 - vv))
    out = np.minimum(left, right)
    return float(out[0]) if v.ndim == 0 else out


# ---------------------------------------------------------------------------
# curves


def _fmt_v(v: float) -> str:
    s = f"{v:.6f}"
    return s if float(s) == v else repr(float(v))


def _fmt_value(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def _json_num(x: float):
    return "inf" if x == INF else ("-inf" if x == -INF else float(x))


def _from_json_num(x) -> float:
    return float(x)


@dataclass
class ProfileCurve:
    grid: np.ndarray
    values: np.ndarray
    params: dict = field(default_factory=dict)
    method: str = ""

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.size < 2 or self.grid.shape != self.values.shape:
            raise CddError("bad-curve", "grid and values must be matching 1D arrays")
        if np.any(np.diff(self.grid) <= 0):
            raise CddError("bad-curve", "grid must be strictly increasing")
        if self.grid[0] != 0.0 or self.grid[-1] != 1.0:
            raise CddError("bad-curve", "grid must contain the endpoints 0 and 1")

    def __call__(self, v):
        return np.interp(v, self.grid, self.values)

    def to_csv(self) -> str:
        lines = ["v,value"]
        lines += [f"{_fmt_v(v)},{_fmt_value(x)}" for v, x in zip(self.grid, self.values)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, params=None, method="") -> "ProfileCurve":
        rows = [ln.split(",") for ln in text.strip().splitlines()]
        if not rows or [c.strip() for c in rows[0]] != ["v", "value"]:
            raise CddError("bad-curve", "CSV needs a 'v,value' header")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        return cls(data[:, 0], data[:, 1], params or {}, method)

    def to_dict(self) -> dict:
        params = {k: _json_num(float(v)) for k, v in self.params.items()}
        points = [{"v": float(v), "value": _json_num(x)} for v, x in zip(self.grid, self.values)]
        return {"params": params, "method": self.method, "points": points}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ProfileCurve":
        d = json.loads(text)
        grid = [float(p["v"]) for p in d["points"]]
        vals = [_from_json_num(p["value"]) for p in d["points"]]
        params = {k: _from_json_num(v) for k, v in d.get("params", {}).items()}
        return cls(grid, vals, params, d.get("method", ""))

    def to_svg(self, width: int = 480, height: int = 320) -> str:
        finite = np.isfinite(self.values)
        n_inf = int((~finite).sum())
        xs, ys = self.grid[finite], self.values[finite]
        pad = 40
        ymax = float(ys.max()) if ys.size and ys.max() > 0 else 1.0
        ymin = min(0.0, float(ys.min())) if ys.size else 0.0
        span = ymax - ymin or 1.0

        def px(v):
            return pad + v * (width - 2 * pad)

        def py(y):
            return height - pad - (y - ymin) / span * (height - 2 * pad)

        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'data-omitted-infinite="{n_inf}">',
            f"<desc>method={self.method}; params={json.dumps(self.to_dict()['params'])}; "
            f"omitted infinite points: {n_inf}</desc>",
            f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
            f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        ]
        for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
            x = px(tick)
            out.append(f'<line x1="{x:.2f}" y1="{height - pad}" x2="{x:.2f}" y2="{height - pad + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{height - pad + 18}" font-size="10" text-anchor="middle">{tick:g}</text>')
        for tick in np.linspace(ymin, ymax, 5):
            y = py(tick)
            out.append(f'<line x1="{pad - 5}" y1="{y:.2f}" x2="{pad}" y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{pad - 8}" y="{y + 3:.2f}" font-size="10" text-anchor="end">{tick:.3g}</text>')
        out.append(f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{pts}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        if fmt == "svg":
            return self.to_svg()
        raise CddError("bad-format", f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# concentration from an isoperimetric profile


def _inverse_integral_table(c: ProfileCurve):
    """Nodes s_0 < ... < s_k = 1/2, I at the nodes, and Phi(s_i) = int_{s_i}^{1/2} ds / I."""
    g, y = c.grid, c.values
    half = 0.5
    keep = g < half
    s = np.concatenate([g[keep], [half]])
    I = np.concatenate([y[keep], [float(np.interp(half, g, y))]])
    if np.any(I < 0):
        raise CddError("degenerate-profile", "negative profile value")
    zero = I[1:] == 0
    inner = zero & (s[1:] > 0)
    if np.any(inner[1:] & (I[1:-1] == 0)[: inner[1:].size]) or I[-1] == 0:
        raise CddError("degenerate-profile", "profile vanishes on part of (0, 1/2]")
    cell = np.empty(s.size - 1)
    for j in range(s.size - 1):
        a, b, h = I[j], I[j + 1], s[j + 1] - s[j]
        if math.isinf(a) or math.isinf(b):
            cell[j] = 0.5 * h * ((0.0 if math.isinf(a) else 1 / a if a > 0 else INF)
                                 + (0.0 if math.isinf(b) else 1 / b if b > 0 else INF))
        elif a == 0 or b == 0:
            cell[j] = INF
        elif a == b:
            cell[j] = h / a
        else:
            cell[j] = h * math.log(b / a) / (b - a)
    phi = np.concatenate([np.cumsum(cell[::-1])[::-1], [0.0]])
    return s, I, phi


def concentration_from_profile(c: ProfileCurve, r):
    """Upper bound on the concentration profile K(r) from an isoperimetric profile curve.

    Inverts ``r = int_K^{1/2} ds / I(s)`` exactly on the piecewise-linear interpolant of
    the curve; the result is clamped to [0, 1/2].
    """
    s, I, phi = _inverse_integral_table(c)
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty_like(rr)
    for i, x in enumerate(rr):
        if x <= 0:
            out[i] = 0.5
            continue
        if x >= phi[0]:
            out[i] = s[0] if math.isinf(phi[0]) else 0.0
            if not math.isinf(phi[0]):
                out[i] = 0.0
            continue
        # phi is non-increasing; find cell with phi[j] >= x > phi[j+1]
        j = int(np.searchsorted(-phi, -x, side="left")) - 1
        j = min(max(j, 0), s.size - 2)
        R = x - phi[j + 1]
        a, b, h = I[j], I[j + 1], s[j + 1] - s[j]
        if math.isinf(a) or math.isinf(b) or a == b:
            inv_b = 0.0 if math.isinf(b) else 1.0 / b
            out[i] = s[j + 1] - R / inv_b if inv_b > 0 else s[j]
        else:
            slope = (b - a) / h
            Iv = b * math.exp(-slope * R)
            out[i] = s[j + 1] - (b - Iv) / slope
    out = np.clip(out, 0.0, 0.5)
    return float(out[0]) if np.ndim(r) == 0 else out


# ---------------------------------------------------------------------------
# grid oracles


def _grid_boundary(wd: WeightedDensity1D, n: int, window=None):
    """Cumulative masses at the n+1 cell boundaries and boundary densities there."""
    lo, hi = window if window is not None else wd.interval
    if not math.isfinite(lo):
        lo = float(wd.quantile(1e-13))
    if not math.isfinite(hi):
        hi = float(wd.quantile(1.0 - 1e-13))
    h = (hi - lo) / n
    mid = lo + (np.arange(n) + 0.5) * h
    f = np.asarray(wd.density(mid), dtype=float)
    w = f * h
    W = w.sum()
    M = np.concatenate([[0.0], np.cumsum(w)]) / W
    fn = f / W
    B = np.concatenate([[fn[0]], 0.5 * (fn[1:] + fn[:-1]), [fn[-1]]])
    return M, B


def brute_force_flat(wd: WeightedDensity1D, n: int = 20001, v=0.5, window=None):
    """Min over grid half-lines of mass v of the boundary density (independent of quantiles)."""
    M, B = _grid_boundary(wd, n, window)
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.minimum(np.interp(vv, M, B), np.interp(1.0 - vv, M, B))
    return float(out[0]) if np.ndim(v) == 0 else out


def brute_force_interval_profile(wd: WeightedDensity1D, n: int = 20001, v=0.5, window=None):
    """Min boundary over grid half-lines, intervals and interval complements of mass v."""
    M, B = _grid_boundary(wd, n, window)
    Mi, Bi = M[1:-1], B[1:-1]
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.empty_like(vv)
    for k, x in enumerate(vv):
        best = min(np.interp(x, M, B), np.interp(1.0 - x, M, B))
        for width in (x, 1.0 - x):
            ends = Mi + width
            ok = ends < Mi[-1]
            if ok.any():
                cost = Bi[ok] + np.interp(ends[ok], Mi, Bi)
                best = min(best, float(cost.min()))
        out[k] = best
    return float(out[0]) if np.ndim(v) == 0 else out
