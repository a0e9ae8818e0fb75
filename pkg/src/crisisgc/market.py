"""Geometric Brownian motion, optionally driven by a common external field.

All rates are per trading day and paths use the exact log-space solution
with dt = 1, so a driven path with coupling beta has log-returns

    (mu - sigma^2 / 2) + sigma * Z_k + beta * h_k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyEnsemble, FieldLengthMismatch, InputError, OverlappingEpochs, TooShort
from .numstat import RandomSource
from .series import Ensemble, Series, as_dates

DEFAULT_START = np.datetime64("2000-01-03", "D")


def business_days(count: int, start=DEFAULT_START) -> np.ndarray:
    """``count`` consecutive weekdays beginning at (or after) ``start``."""
    return np.busday_offset(np.datetime64(start, "D"), np.arange(count), roll="forward")


@dataclass(frozen=True)
class GbmParams:
    mu: float
    sigma: float
    x0: float = 100.0
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise InputError("sigma must be >= 0")
        if not self.x0 > 0:
            raise InputError("x0 must be positive")


@dataclass(frozen=True)
class DrivenGbmParams:
    base: GbmParams
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise InputError("beta must lie in [0, 1]")


@dataclass(frozen=True)
class ExternalField:
    """Zero-mean daily increments h(t) of the common driver."""

    increments: Series
    smoothing_window: int = 1

    def __post_init__(self):
        if abs(float(np.mean(self.increments.values))) > 1e-12:
            raise InputError("external field increments must have zero mean")

    @classmethod
    def demeaned(cls, increments: Series, smoothing_window: int = 1) -> "ExternalField":
        v = increments.values - increments.values.mean()
        return cls(Series(increments.id, increments.dates, v), smoothing_window)

    def __len__(self):
        return len(self.increments)


def _path(p: GbmParams, n_steps: int, shock=None, beta: float = 0.0, dates=None,
          name: str = "gbm") -> Series:
    if n_steps < 1:
        raise InputError("n_steps must be >= 1")
    z = RandomSource(p.seed, p.stream_id).standard_normal(n_steps)
    incr = (p.mu - 0.5 * p.sigma ** 2) + p.sigma * z
    if shock is not None:
        incr = incr + beta * shock
    logx = np.concatenate([[0.0], np.cumsum(incr)])
    prices = p.x0 * np.exp(logx)
    if dates is None:
        dates = business_days(n_steps + 1)
    return Series(name, dates, prices)


def simulate_gbm(p: GbmParams, n_steps: int, dates=None, name: str = "gbm") -> Series:
    """Price path of ``n_steps + 1`` points starting at ``p.x0``."""
    return _path(p, n_steps, dates=dates, name=name)


def simulate_driven_gbm(p: DrivenGbmParams, field: ExternalField, dates=None,
                        name: str = "driven_gbm") -> Series:
    h = field.increments
    n_steps = len(h)
    if dates is not None and len(dates) != n_steps + 1:
        raise FieldLengthMismatch(f"field has {n_steps} increments but {len(dates)} price dates")
    if dates is None:
        first = np.busday_offset(h.dates[0], -1, roll="backward")
        dates = np.concatenate([[first], h.dates])
    return _path(p.base, n_steps, shock=h.values, beta=p.beta, dates=dates, name=name)


def calibrate_from_series(log_returns: Series, x0: float = 100.0, seed: int = 0,
                          stream_id: int = 0) -> GbmParams:
    """Match a GBM to observed log-returns: sigma = sample std, mu = mean + sigma^2 / 2."""
    r = log_returns.values
    if len(r) < 30:
        raise TooShort(f"{log_returns.id}: need at least 30 log-returns to calibrate, got {len(r)}")
    sigma = float(np.std(r, ddof=1))
    mu = float(np.mean(r)) + 0.5 * sigma ** 2
    return GbmParams(mu, sigma, x0, seed, stream_id)


def centered_moving_average(v, width: int) -> np.ndarray:
    """Centred mean of odd ``width``; the window shrinks symmetrically at the ends."""
    v = np.asarray(v, dtype=float)
    if width < 1 or width % 2 == 0:
        raise InputError("smoothing width must be a positive odd integer")
    n = len(v)
    t = np.arange(n)
    half = np.minimum(np.minimum(width // 2, t), n - 1 - t)
    csum = np.concatenate([[0.0], np.cumsum(v)])
    return (csum[t + half + 1] - csum[t - half]) / (2 * half + 1)


def build_external_field(ens: Ensemble, smoothing_window: int = 11) -> ExternalField:
    """Estimate h(t) as the smoothed, de-meaned ensemble mean of log-returns."""
    if len(ens.members) < 2:
        raise EmptyEnsemble("build_external_field needs at least 2 members")
    raw = ens.matrix.mean(axis=0)
    smooth = centered_moving_average(raw, smoothing_window)
    return ExternalField.demeaned(Series("field", ens.calendar, smooth), smoothing_window)


@dataclass(frozen=True)
class Epoch:
    start: int
    end: int
    amplitude_factor: float


def amplitude_envelope(epochs, n_steps: int) -> np.ndarray:
    env = np.ones(n_steps)
    last_end = 0
    for e in sorted(epochs, key=lambda e: e.start):
        if not 0 <= e.start < e.end <= n_steps:
            raise InputError(f"epoch [{e.start}, {e.end}) outside [0, {n_steps})")
        if e.start < last_end:
            raise OverlappingEpochs(f"epoch starting at {e.start} overlaps the previous one")
        if e.amplitude_factor < 0:
            raise InputError("amplitude_factor must be >= 0")
        env[e.start:e.end] = e.amplitude_factor
        last_end = e.end
    return env


def synthetic_field(epochs, baseline_std: float, n_steps: int, rng: RandomSource,
                    smoothing_window: int = 1, dates=None) -> ExternalField:
    """Gaussian field with unit-variance shape scaled by a piecewise amplitude.

    With ``smoothing_window`` > 1 the noise is smoothed by the same centred
    moving average used for estimated fields and rescaled back to unit
    variance before the amplitude envelope is applied.
    """
    if baseline_std < 0:
        raise InputError("baseline_std must be >= 0")
    env = amplitude_envelope(epochs, n_steps)
    z = rng.standard_normal(n_steps)
    if smoothing_window > 1:
        t = np.arange(n_steps)
        half = np.minimum(np.minimum(smoothing_window // 2, t), n_steps - 1 - t)
        z = centered_moving_average(z, smoothing_window) * np.sqrt(2 * half + 1)
    h = baseline_std * env * z
    if dates is None:
        dates = business_days(n_steps + 1)[1:]
    return ExternalField.demeaned(Series("field", dates, h), smoothing_window)


def driven_ensemble(field: ExternalField, n_members: int, sigma: float, seed: int,
                    mu: float | None = None, x0: float = 100.0, betas=None,
                    params=None, names=None, dates=None) -> tuple[Ensemble, list[DrivenGbmParams]]:
    """Simulate ``n_members`` driven paths; member k uses random stream k + 1.

    Stream 0 of ``seed`` draws the couplings beta ~ U[0, 1] unless ``betas``
    is given. ``params`` (a list of GbmParams) overrides mu, sigma and x0.
    """
    names = names or [f"S{k + 1:02d}" for k in range(n_members)]
    if betas is None:
        betas = RandomSource(seed, 0).uniform01(n_members)
    betas = np.broadcast_to(np.asarray(betas, dtype=float), (n_members,))
    if mu is None:
        mu = 0.5 * sigma ** 2
    members, all_params = [], []
    for k in range(n_members):
        if params is not None:
            b = params[k]
            base = GbmParams(b.mu, b.sigma, b.x0, seed, k + 1)
        else:
            base = GbmParams(mu, sigma, x0, seed, k + 1)
        dp = DrivenGbmParams(base, float(betas[k]))
        members.append(simulate_driven_gbm(dp, field, dates=dates, name=names[k]))
        all_params.append(dp)
    return Ensemble(tuple(members)), all_params
