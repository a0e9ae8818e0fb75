"""Date-indexed series, aligned ensembles, sliding windows and the ADF check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyEnsemble,
    ExcessiveMissingData,
    InputError,
    NonPositivePrice,
    SeriesShorterThanWindow,
    SingularRegression,
    TooShort,
)
from .numstat import RankDeficient, ols


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def as_dates(dates) -> np.ndarray:
    return np.asarray(dates, dtype="datetime64[D]")


@dataclass(frozen=True, eq=False)
class Series:
    """A named scalar series on an increasing calendar of trading days."""

    id: str
    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dates = as_dates(self.dates)
        values = np.asarray(self.values, dtype=float)
        if dates.ndim != 1 or values.ndim != 1:
            raise InputError(f"{self.id}: dates and values must be 1-D")
        if len(dates) != len(values):
            raise InputError(f"{self.id}: {len(dates)} dates but {len(values)} values")
        if len(values) < 1:
            raise TooShort(f"{self.id}: empty series")
        if len(dates) > 1 and not np.all(dates[1:] > dates[:-1]):
            raise InputError(f"{self.id}: dates must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise InputError(f"{self.id}: non-finite values")
        object.__setattr__(self, "dates", _frozen(dates))
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.id == other.id
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.values, other.values)
        )

    def slice(self, start: int, end: int) -> "Series":
        return Series(self.id, self.dates[start:end], self.values[start:end])


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Series sharing one calendar; ``matrix`` is members x time."""

    members: tuple
    calendar: np.ndarray = field(default=None)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise EmptyEnsemble("ensemble has no members")
        calendar = members[0].dates if self.calendar is None else as_dates(self.calendar)
        ids = [s.id for s in members]
        if len(set(ids)) != len(ids):
            raise InputError(f"duplicate member ids: {ids}")
        for s in members:
            if not np.array_equal(s.dates, calendar):
                raise InputError(f"{s.id}: calendar differs from the ensemble calendar")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "calendar", _frozen(calendar))

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.members]

    @property
    def matrix(self) -> np.ndarray:
        return np.vstack([s.values for s in self.members])

    def __len__(self):
        return len(self.calendar)

    def slice(self, start: int, end: int) -> "Ensemble":
        return Ensemble(tuple(s.slice(start, end) for s in self.members))

    @classmethod
    def from_matrix(cls, ids, dates, matrix) -> "Ensemble":
        dates = as_dates(dates)
        return cls(tuple(Series(i, dates, row) for i, row in zip(ids, np.asarray(matrix))))


@dataclass
class AlignmentReport:
    kept: list
    rejected: dict          # id -> missing fraction
    dropped_dates: list     # dates of the union calendar not in the result


def align(series, max_missing: float = 0.05) -> tuple[Ensemble, AlignmentReport]:
    """Inner-join a list of series onto their common calendar.

    A member missing more than ``max_missing`` of the union calendar is
    rejected before the intersection is taken.
    """
    series = list(series)
    if not series:
        raise EmptyEnsemble("no series to align")
    union = np.unique(np.concatenate([s.dates for s in series]))
    rejected = {}
    kept = []
    for s in series:
        frac = 1.0 - len(s.dates) / len(union)
        if frac > max_missing:
            rejected[s.id] = frac
        else:
            kept.append(s)
    if not kept:
        raise ExcessiveMissingData(
            "every member misses more than "
            f"{max_missing:.0%} of the union calendar: {sorted(rejected)}"
        )
    common = kept[0].dates
    for s in kept[1:]:
        common = np.intersect1d(common, s.dates, assume_unique=True)
    if len(common) == 0:
        raise EmptyEnsemble("aligned calendar is empty")
    members = []
    for s in kept:
        mask = np.isin(s.dates, common, assume_unique=True)
        members.append(Series(s.id, s.dates[mask], s.values[mask]))
    dropped = np.setdiff1d(union, common, assume_unique=True)
    report = AlignmentReport(kept=[s.id for s in kept], rejected=rejected,
                             dropped_dates=list(dropped))
    return Ensemble(tuple(members)), report


def log_returns(prices: Series) -> Series:
    p = prices.values
    if len(p) < 2:
        raise TooShort(f"{prices.id}: need at least 2 prices for log-returns")
    if np.any(p <= 0):
        k = int(np.argmax(p <= 0))
        raise NonPositivePrice(f"{prices.id}: non-positive price {p[k]} at {prices.dates[k]}")
    return Series(prices.id, prices.dates[1:], np.log(p[1:] / p[:-1]))


def ensemble_log_returns(prices: Ensemble) -> Ensemble:
    return Ensemble(tuple(log_returns(s) for s in prices.members))


# --- windows ----------------------------------------------------------------

@dataclass(frozen=True)
class WindowSpec:
    length: int = 252
    step: int = 63

    def __post_init__(self):
        if self.length < 2 or self.step < 1:
            raise InputError(f"invalid window spec length={self.length} step={self.step}")


@dataclass(frozen=True)
class WindowIndex:
    start: int
    end: int
    label_date: np.datetime64

    @property
    def length(self):
        return self.end - self.start


def windows(n: int, spec: WindowSpec, dates=None) -> list[WindowIndex]:
    """Full-length windows at offsets 0, step, 2*step, ...; a partial tail is dropped.

    Each window is labelled with the date at ``start + length // 2``; if
    ``dates`` is omitted the label is that offset as a day count from the epoch.
    """
    if n < spec.length:
        raise SeriesShorterThanWindow(f"series of length {n} is shorter than window {spec.length}")
    count = (n - spec.length) // spec.step + 1
    out = []
    for k in range(count):
        start = k * spec.step
        mid = start + spec.length // 2
        label = as_dates(dates)[mid] if dates is not None else np.datetime64(mid, "D")
        out.append(WindowIndex(start, start + spec.length, label))
    return out


# --- augmented Dickey-Fuller --------------------------------------------------

# 1/5/10% quantiles of the constant-only ADF t-statistic (lag 1) under the
# random-walk null, from scripts/calibrate_adf.py (1e5 replicates per length).
ADF_CRITICAL = {
    250: (-3.4751, -2.8726, -2.5690),
    500: (-3.4566, -2.8767, -2.5791),
    1000: (-3.4524, -2.8579, -2.5682),
}
ADF_LEVELS = ("1%", "5%", "10%")


def adf_critical_values(n: int) -> tuple[float, float, float]:
    """Critical values interpolated linearly in 1/n, clamped to the calibrated range."""
    ns = sorted(ADF_CRITICAL)
    inv = np.array([1.0 / k for k in ns])[::-1]
    table = np.array([ADF_CRITICAL[k] for k in ns])[::-1]
    x = min(max(1.0 / n, inv[0]), inv[-1])
    return tuple(float(np.interp(x, inv, table[:, j])) for j in range(3))


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    reject_unit_root_at: str   # "1%", "5%", "10%" or "none"
    n_obs: int
    lag: int


def adf_statistic(values, max_lag: int = 1) -> tuple[float, int]:
    y = np.asarray(values, dtype=float)
    if max_lag < 0:
        raise InputError("max_lag must be >= 0")
    if len(y) < max_lag + 10:
        raise TooShort(f"ADF needs at least {max_lag + 10} observations, got {len(y)}")
    dy = np.diff(y)
    rows = len(dy) - max_lag
    cols = [np.ones(rows), y[max_lag:-1]]
    for lag in range(1, max_lag + 1):
        cols.append(dy[max_lag - lag:len(dy) - lag])
    X = np.column_stack(cols)
    target = dy[max_lag:]
    try:
        fit = ols(X, target)
    except RankDeficient as exc:
        raise SingularRegression(f"ADF regression is singular: {exc}") from exc
    if fit.rss <= 0.0:
        raise SingularRegression("ADF regression has zero residual variance")
    s2 = fit.rss / fit.dof
    # Var(gamma) = s2 / ||M y_lag||^2, M annihilating the remaining columns
    aux = ols(np.delete(X, 1, axis=1), X[:, 1])
    se = np.sqrt(s2 / aux.rss)
    return float(fit.coefficients[1] / se), rows


def adf_stationarity(s, max_lag: int = 1) -> AdfResult:
    values = s.values if isinstance(s, Series) else s
    stat, n_obs = adf_statistic(values, max_lag)
    crit = adf_critical_values(len(values))
    level = "none"
    for name, c in zip(ADF_LEVELS, crit):
        if stat < c:
            level = name
            break
    return AdfResult(stat, level, n_obs, max_lag)
