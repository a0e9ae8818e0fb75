"""Least squares, the F-distribution tail, correlation and seeded random streams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstantInput, InputError, RankDeficient

# Relative size of an R diagonal entry (columns scaled to unit norm) below
# which a regressor is treated as a linear combination of the others.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class OlsFit:
    coefficients: np.ndarray
    rss: float
    n_obs: int
    n_params: int

    @property
    def dof(self) -> int:
        return self.n_obs - self.n_params


def ols(design, response) -> OlsFit:
    """Least-squares fit of ``response`` on the columns of ``design`` via QR.

    Columns are scaled to unit norm before factorisation so that the rank test
    does not depend on the units of individual regressors.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if y.shape != (n,):
        raise InputError(f"response has shape {y.shape}, expected ({n},)")
    if n <= k:
        raise InputError(f"need more observations than parameters (n={n}, k={k})")

    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0.0):
        raise RankDeficient("design has an all-zero column")
    Q, R = np.linalg.qr(X / norms)
    diag = np.abs(np.diag(R))
    if diag.min() < RANK_TOL:
        raise RankDeficient(f"design is rank deficient (min |R_ii| = {diag.min():.3g})")

    qty = Q.T @ y
    beta = np.linalg.solve(R, qty) / norms
    resid = y - X @ beta
    rss = float(resid @ resid)
    return OlsFit(coefficients=beta, rss=rss, n_obs=n, n_params=k)


# --- regularized incomplete beta ------------------------------------------

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAXITER = 10_000


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _betainc_split(a: float, b: float, x: float, one_minus_x: float) -> float:
    # x and 1-x are passed separately so callers can avoid cancellation.
    if x <= 0.0:
        return 0.0
    if one_minus_x <= 0.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(one_minus_x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, one_minus_x) / b


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b) for a, b > 0, 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise InputError("betainc requires a > 0 and b > 0")
    if not 0.0 <= x <= 1.0:
        raise InputError("betainc requires 0 <= x <= 1")
    return _betainc_split(a, b, x, 1.0 - x)


def f_sf(x: float, d1: int, d2: int) -> float:
    """P(F > x) for F ~ F(d1, d2)."""
    if d1 <= 0 or d2 <= 0:
        raise InputError("degrees of freedom must be positive")
    if x < 0 or math.isnan(x):
        raise InputError(f"f_sf requires x >= 0, got {x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    denom = d2 + d1 * x
    p = _betainc_split(0.5 * d2, 0.5 * d1, d2 / denom, d1 * x / denom)
    return min(1.0, max(0.0, p))


# --- descriptive statistics -------------------------------------------------

def pearson_corr(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise InputError("pearson_corr needs two 1-D vectors of equal length")
    if a.size < 2:
        raise InputError("pearson_corr needs at least 2 observations")
    da = a - a.mean()
    db = b - b.mean()
    sa = math.sqrt(da @ da)
    sb = math.sqrt(db @ db)
    if sa == 0.0 or sb == 0.0:
        raise ConstantInput("pearson_corr of a constant vector is undefined")
    r = float(da @ db) / (sa * sb)
    return max(-1.0, min(1.0, r))


def sample_std(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.std(v, ddof=1))


# --- random streams -------------------------------------------------------

class RandomSource:
    """Reproducible random stream identified by ``(seed, stream_id)``.

    Backed by the counter-based Philox generator. Distinct stream ids give
    statistically independent streams for the same seed, so every simulated
    path can own its own source.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not (0 <= seed < 2**64 and 0 <= stream_id < 2**64):
            raise InputError("seed and stream_id must be unsigned 64-bit integers")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream_id={self.stream_id})"

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def uniform01(self, size=None):
        return self._gen.random(size)

    def permutation(self, x):
        return self._gen.permutation(x)
