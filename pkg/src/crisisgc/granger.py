"""Bivariate Granger-causality F-tests and their windowed pairwise matrices."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstantInput, InputError, NumericalError, RankDeficient, TooShort
from .numstat import RANK_TOL, f_sf, ols
from .series import Ensemble, Series, WindowIndex, WindowSpec, windows

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GcConfig:
    tau: int = 5
    tau_prime: int = 5
    alpha: float = 0.05

    def __post_init__(self):
        if self.tau < 1 or self.tau_prime < 1:
            raise InputError("lag orders must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise InputError("alpha must lie in (0, 1)")

    @property
    def max_lag(self) -> int:
        return max(self.tau, self.tau_prime)

    def min_length(self) -> int:
        return 1 + self.tau_prime + self.tau + 11


@dataclass(frozen=True)
class GcResult:
    f_statistic: float
    p_value: float
    causal: bool
    d1: int
    d2: int
    rss_restricted: float
    rss_unrestricted: float


def lag_block(v: np.ndarray, lags: int, skip: int) -> np.ndarray:
    """Columns v[t-1], ..., v[t-lags] for t = skip, ..., len(v)-1."""
    n = v.shape[-1]
    return np.stack([v[..., skip - l:n - l] for l in range(1, lags + 1)], axis=-1)


def _f_from_rss(rss_r, rss_u, d1, d2):
    if rss_u <= 0.0:
        raise NumericalError("unrestricted model fits exactly; F is undefined")
    return max(0.0, ((rss_r - rss_u) / d1) / (rss_u / d2))


def gc_test(x, y, cfg: GcConfig = GcConfig()) -> GcResult:
    """Test whether the past of ``x`` improves a linear forecast of ``y``.

    Both the restricted model (constant and ``tau_prime`` own lags) and the
    unrestricted model (plus ``tau`` lags of ``x``) are fitted on the same
    sample, which drops the first ``max(tau, tau_prime)`` observations.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InputError("x and y must be 1-D vectors of equal length")
    if len(y) < cfg.min_length():
        raise TooShort(f"Granger test needs at least {cfg.min_length()} observations, got {len(y)}")
    p = cfg.max_lag
    target = y[p:]
    n_obs = len(target)
    restricted = np.column_stack([np.ones(n_obs), lag_block(y, cfg.tau_prime, p)])
    unrestricted = np.column_stack([restricted, lag_block(x, cfg.tau, p)])
    fit_r = ols(restricted, target)
    fit_u = ols(unrestricted, target)
    d1 = cfg.tau
    d2 = n_obs - (1 + cfg.tau_prime + cfg.tau)
    F = _f_from_rss(fit_r.rss, fit_u.rss, d1, d2)
    pval = f_sf(F, d1, d2)
    return GcResult(F, pval, pval < cfg.alpha, d1, d2, fit_r.rss, fit_u.rss)


@dataclass
class CausalityMatrix:
    """verdicts[i, j] is True when member i Granger-causes member j."""

    ids: list
    verdicts: np.ndarray
    p_values: np.ndarray
    window: WindowIndex | None = None
    diagnostics: list = field(default_factory=list)

    def density(self) -> float:
        m = len(self.ids)
        off = ~np.eye(m, dtype=bool)
        return float(self.verdicts[off].mean())


def _restricted_basis(y: np.ndarray, cfg: GcConfig):
    p = cfg.max_lag
    target = y[p:]
    D = np.column_stack([np.ones(len(target)), lag_block(y, cfg.tau_prime, p)])
    norms = np.linalg.norm(D, axis=0)
    if np.any(norms == 0.0):
        raise RankDeficient("restricted design has an all-zero column")
    Q, R = np.linalg.qr(D / norms)
    if np.abs(np.diag(R)).min() < RANK_TOL:
        raise RankDeficient("restricted design is rank deficient")
    resid = target - Q @ (Q.T @ target)
    return Q, resid


def causality_matrix(window_data: Ensemble, cfg: GcConfig = GcConfig(),
                     window: WindowIndex | None = None) -> CausalityMatrix:
    """All ordered-pair Granger tests within one window.

    Uses the partialled-out form of the nested F-test: for each effect the
    restricted fit is computed once, and each candidate cause's lags are
    residualised against it. Pairs whose regression is singular are recorded
    as non-causal with p = 1 and a diagnostic entry.
    """
    Y = window_data.matrix
    m, n = Y.shape
    if m < 2:
        raise InputError("causality_matrix needs at least 2 members")
    if n < cfg.min_length():
        raise TooShort(f"window of length {n} too short for lags ({cfg.tau}, {cfg.tau_prime})")
    ids = window_data.ids
    p = cfg.max_lag
    n_obs = n - p
    d1 = cfg.tau
    d2 = n_obs - (1 + cfg.tau_prime + cfg.tau)

    verdicts = np.zeros((m, m), dtype=bool)
    pvals = np.full((m, m), np.nan)
    diags = []
    cause_lags = lag_block(Y, cfg.tau, p)            # (m, n_obs, tau)
    cause_norms = np.linalg.norm(cause_lags, axis=1)  # (m, tau)

    def fail(i, j, reason):
        pvals[i, j] = 1.0
        diags.append({"cause": ids[i], "effect": ids[j], "reason": reason})
        log.info("pair %s -> %s skipped: %s", ids[i], ids[j], reason)

    for j in range(m):
        causes = [i for i in range(m) if i != j]
        try:
            Q, e_r = _restricted_basis(Y[j], cfg)
        except RankDeficient as exc:
            for i in causes:
                fail(i, j, f"rank deficient: {exc}")
            continue
        rss_r = float(e_r @ e_r)
        Xc = cause_lags[causes]
        Mx = Xc - Q @ np.einsum("rk,crt->ckt", Q, Xc)
        norms = cause_norms[causes]
        with np.errstate(divide="ignore", invalid="ignore"):
            Qx, Rx = np.linalg.qr(np.nan_to_num(Mx / norms[:, None, :]))
        rdiag = np.abs(np.diagonal(Rx, axis1=1, axis2=2)).min(axis=1)
        ok = (norms.min(axis=1) > 0) & (rdiag >= RANK_TOL)
        proj = np.einsum("crk,r->ck", Qx, e_r)
        e_u = e_r[None, :] - np.einsum("crk,ck->cr", Qx, proj)
        rss_u = np.einsum("cr,cr->c", e_u, e_u)
        for c, i in enumerate(causes):
            if not ok[c]:
                fail(i, j, "rank deficient: cause lags collinear with restricted design")
                continue
            try:
                F = _f_from_rss(rss_r, float(rss_u[c]), d1, d2)
            except NumericalError as exc:
                fail(i, j, str(exc))
                continue
            pv = f_sf(F, d1, d2)
            pvals[i, j] = pv
            verdicts[i, j] = pv < cfg.alpha
    return CausalityMatrix(ids, verdicts, pvals, window, diags)


def windowed_causality(ens: Ensemble, spec: WindowSpec = WindowSpec(),
                       cfg: GcConfig = GcConfig()) -> list[CausalityMatrix]:
    out = []
    for w in windows(len(ens), spec, ens.calendar):
        out.append(causality_matrix(ens.slice(w.start, w.end), cfg, w))
    return out


def mean_causality(matrices) -> Series:
    dates = [cm.window.label_date for cm in matrices]
    return Series("mean_causality", dates, [cm.density() for cm in matrices])


def mean_causality_series(ens: Ensemble, spec: WindowSpec = WindowSpec(),
                          cfg: GcConfig = GcConfig()) -> Series:
    """Fraction of causal ordered pairs in each window, labelled by window midpoint."""
    return mean_causality(windowed_causality(ens, spec, cfg))


def correlation_matrix(window_data: Ensemble) -> np.ndarray:
    Y = window_data.matrix
    if Y.shape[0] < 2:
        raise InputError("correlation_matrix needs at least 2 members")
    Z = Y - Y.mean(axis=1, keepdims=True)
    norms = np.sqrt(np.einsum("it,it->i", Z, Z))
    constant = [window_data.ids[k] for k in np.flatnonzero(norms == 0.0)]
    if constant:
        raise ConstantInput(f"constant members in window: {constant}")
    Z /= norms[:, None]
    C = np.clip(Z @ Z.T, -1.0, 1.0)
    C = 0.5 * (C + C.T)
    np.fill_diagonal(C, 1.0)
    return C


def exceedance_fraction(real_series, baseline_mean: float, baseline_sd: float) -> float:
    """Fraction of windows where the series exceeds baseline_mean + 2 * baseline_sd."""
    if not baseline_sd > 0:
        raise InputError("baseline_sd must be positive")
    values = real_series.values if isinstance(real_series, Series) else np.asarray(real_series)
    if len(values) == 0:
        return 0.0
    return float(np.mean(values > baseline_mean + 2.0 * baseline_sd))
