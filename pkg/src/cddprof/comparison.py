"""One-dimensional comparison checks for Jacobian functions.

A sampled Jacobian J with J(0) = 1, J'(0) = H satisfies the curvature-dimension
differential inequality -LogHess_{N-1} J >= rho when its residual is nonnegative; the
Sturm comparison then predicts J <= J_{H,rho,N} wherever both are defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CddError
from .model_density import CDParams, eval_J


@dataclass
class JacobianSample:
    t: np.ndarray
    J: np.ndarray
    H: float | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.J = np.asarray(self.J, dtype=float)
        if self.t.ndim != 1 or self.t.shape != self.J.shape or self.t.size < 3:
            raise CddError("bad-sample", "t and J must be matching 1D arrays of length >= 3")
        if np.any(np.diff(self.t) <= 0):
            raise CddError("bad-sample", "t-grid must be strictly increasing")
        i0 = np.flatnonzero(self.t == 0.0)
        if i0.size != 1:
            raise CddError("bad-sample", "t-grid must contain 0")
        self.i0 = int(i0[0])
        if abs(self.J[self.i0] - 1.0) > 1e-9:
            raise CddError("bad-sample", "J(0) must equal 1")
        span = self.t[-1] - self.t[0]
        if np.max(np.diff(self.t)) > 1e-2 * span + 1e-15:
            raise CddError("bad-sample", "grid spacing must be at most 1% of the span")
        if self.H is None:
            self.H = self._slope_at_zero()

    def _slope_at_zero(self) -> float:
        i = self.i0
        if 0 < i < self.t.size - 1:
            return float(_first_derivative(self.t, self.J)[i - 1])
        j = i + 1 if i == 0 else i - 1
        return float((self.J[j] - self.J[i]) / (self.t[j] - self.t[i]))

    @classmethod
    def from_csv(cls, text: str, H: float | None = None) -> "JacobianSample":
        rows = [ln.split(",") for ln in text.strip().splitlines()]
        if not rows or [c.strip() for c in rows[0]] != ["t", "J"]:
            raise CddError("bad-sample", "CSV needs a 't,J' header")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        return cls(data[:, 0], data[:, 1], H)

    def to_csv(self) -> str:
        return "t,J\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(self.t, self.J))


def _first_derivative(t, y):
    """Three-point derivative at the interior nodes (centered on a uniform grid)."""
    h0, h1 = t[1:-1] - t[:-2], t[2:] - t[1:-1]
    return (-h1 / (h0 * (h0 + h1)) * y[:-2] + (h1 - h0) / (h0 * h1) * y[1:-1]
            + h0 / (h1 * (h0 + h1)) * y[2:])


def _second_derivative(t, y):
    h0, h1 = t[1:-1] - t[:-2], t[2:] - t[1:-1]
    return 2.0 * (y[:-2] / (h0 * (h0 + h1)) - y[1:-1] / (h0 * h1) + y[2:] / (h1 * (h0 + h1)))


def jac_cd_residuals(J: JacobianSample, p: CDParams) -> np.ndarray:
    """-LogHess_{N-1} J - rho at the interior grid points."""
    if p.is_one:
        raise CddError("bad-params", "N = 1 has no differential inequality")
    if np.any(J.J <= 0) or not np.all(np.isfinite(J.J)):
        raise CddError("outside-positivity-interval", "J must be positive and finite on the grid")
    ell = np.log(J.J)
    d1 = _first_derivative(J.t, ell)
    d2 = _second_derivative(J.t, ell)
    hess = d2 if p.is_inf else d2 + d1 * d1 / (p.N - 1.0)
    return -hess - p.rho


def jac_cd_check(J: JacobianSample, p: CDParams) -> float:
    """Minimum residual over the interior grid; >= -tol certifies the inequality on the sample."""
    return float(np.min(jac_cd_residuals(J, p)))


def sturm_compare(J: JacobianSample, p: CDParams, tol: float = 1e-9,
                  cd_tol: float = 1e-5) -> tuple[bool, float]:
    """Check J <= J_{H,rho,N} on the grid.

    A point counts as dominated when J <= model + tol * max(1, model).  Returns
    (dominated, largest excess beyond that allowance); the excess never grows with tol.
    """
    if jac_cd_check(J, p) < -cd_tol:
        raise CddError("not-cd-certified", "sample fails the differential inequality")
    model = np.asarray(eval_J(J.H, p, J.t), dtype=float)
    defined = np.isfinite(model)
    excess = J.J[defined] - model[defined] - tol * np.maximum(1.0, model[defined])
    worst = float(np.max(excess, initial=0.0))
    worst = max(worst, 0.0)
    return worst == 0.0, worst


def cauchy_schwarz_split(alpha: float, beta: float, A: float, B: float) -> tuple[float, float, bool]:
    """(A^2/alpha + B^2/beta, (A+B)^2/(alpha+beta), whether (alpha, beta) lies in a validity set).

    On {alpha, beta > 0} or {alpha + beta < 0, alpha beta < 0} the first dominates the second.
    """
    if alpha == 0 or beta == 0:
        raise CddError("bad-params", "alpha and beta must be nonzero")
    if alpha + beta == 0:
        raise CddError("degenerate-split", "alpha + beta = 0")
    lhs = A * A / alpha + B * B / beta
    rhs = (A + B) ** 2 / (alpha + beta)
    valid = (alpha > 0 and beta > 0) or (alpha + beta < 0 and alpha * beta < 0)
    return lhs, rhs, valid


def model_sample(H: float, p: CDParams, lo: float, hi: float, n: int = 2001,
                 eps: float = 0.0) -> JacobianSample:
    """J_{H,rho,N}(t) exp(-eps t^2) on a uniform grid through 0 (lo < 0 < hi)."""
    if not lo < 0 < hi:
        raise CddError("bad-params", "need lo < 0 < hi")
    h = (hi - lo) / (n - 1)
    k = math.floor(-lo / h)
    t = (np.arange(n) - k) * h
    J = np.asarray(eval_J(H, p, t), dtype=float) * np.exp(-eps * t * t)
    return JacobianSample(t, J, H)
