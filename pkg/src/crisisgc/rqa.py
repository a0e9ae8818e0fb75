"""Unembedded auto-recurrence quantification with a fixed recurrence rate.

The line of identity is never counted: it is removed from the number of
possible points, from the recurrent points, and it interrupts vertical lines.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistances, InputError
from .series import Ensemble, Series, WindowIndex, WindowSpec, windows

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RqaSummary:
    rr: float
    det: float
    lam: float
    epsilon: float = float("nan")
    achieved_rr: float = float("nan")
    window: WindowIndex | None = None
    series_id: str = ""


def recurrence_matrix(values, epsilon: float) -> np.ndarray:
    """Boolean matrix of |x_i - x_j| < epsilon with the main diagonal cleared."""
    x = np.asarray(values, dtype=float)
    R = np.abs(x[:, None] - x[None, :]) < epsilon
    np.fill_diagonal(R, False)
    return R


def _pair_distances(x: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(len(x), k=1)
    return np.abs(x[iu[0]] - x[iu[1]])


def calibrate_epsilon(values, target_rr: float = 5.0) -> tuple[float, float]:
    """Threshold giving ``target_rr`` percent recurrent off-diagonal points.

    With N_p = n^2 - n ordered pairs and q = round(target_rr / 100 * N_p), the
    threshold is the midpoint between the q-th and (q+1)-th smallest ordered
    pair distance. Every unordered distance appears twice in that multiset, so
    the k-th ordered distance is the ceil(k/2)-th unordered one. Returns
    ``(epsilon, achieved_rr)``; ties can make the two rates differ.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 2:
        raise InputError("calibrate_epsilon needs at least 2 values")
    if not 0.0 < target_rr < 100.0:
        raise InputError("target_rr must lie in (0, 100)")
    d = _pair_distances(x)
    if d.max() == 0.0:
        raise DegenerateDistances("all values identical; recurrence rate is 0 or 100")
    n_p = n * n - n
    q = int(round(target_rr / 100.0 * n_p))
    q = min(max(q, 1), n_p - 1)
    lo_k, hi_k = (q - 1) // 2, q // 2          # 0-based unordered ranks
    part = np.partition(d, (lo_k, hi_k))
    eps = 0.5 * (part[lo_k] + part[hi_k])
    if eps == 0.0:
        # only zero distances below the cut: admit them and nothing else
        eps = 0.5 * d[d > 0].min()
    achieved = 100.0 * 2 * np.count_nonzero(d < eps) / n_p
    return float(eps), float(achieved)


def _points_in_runs(B: np.ndarray, min_len: int) -> int:
    """Number of True entries lying in runs of length >= min_len along axis 1."""
    if B.size == 0:
        return 0
    padded = np.zeros((B.shape[0], B.shape[1] + 2), dtype=np.int8)
    padded[:, 1:-1] = B
    step = np.diff(padded, axis=1)
    starts = np.flatnonzero(step.ravel() == 1)
    ends = np.flatnonzero(step.ravel() == -1)
    lengths = ends - starts
    return int(lengths[lengths >= min_len].sum())


def _diagonals_upper(R: np.ndarray) -> np.ndarray:
    """Row k-1 holds diagonal k (R[i, i+k]) left-aligned, padded with False."""
    n = R.shape[0]
    i, k = np.meshgrid(np.arange(n), np.arange(1, n), indexing="xy")
    j = i + k
    valid = j < n
    out = np.zeros((n - 1, n), dtype=bool)
    out[valid] = R[i[valid], j[valid]]
    return out


def line_counts(R: np.ndarray, l_min: int = 2, v_min: int = 2) -> tuple[int, int, int]:
    """(N_rec, N_diag, N_vert) for a recurrence matrix with a cleared diagonal."""
    n_rec = int(np.count_nonzero(R))
    upper = _points_in_runs(_diagonals_upper(R), l_min)
    lower = _points_in_runs(_diagonals_upper(R.T), l_min)
    n_vert = _points_in_runs(R.T, v_min)
    return n_rec, upper + lower, n_vert


def recurrence_quantifiers(values, epsilon: float, l_min: int = 2, v_min: int = 2) -> RqaSummary:
    """RR, DET and LAM in percent."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 2:
        raise InputError("need at least 2 values")
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    if l_min < 2 or v_min < 2:
        raise InputError("minimal line lengths must be >= 2")
    R = recurrence_matrix(x, epsilon)
    n_rec, n_diag, n_vert = line_counts(R, l_min, v_min)
    rr = 100.0 * n_rec / (n * n - n)
    if n_rec == 0:
        return RqaSummary(rr, 0.0, 0.0, epsilon)
    return RqaSummary(rr, 100.0 * n_diag / n_rec, 100.0 * n_vert / n_rec, epsilon)


@dataclass
class ArqaResult:
    mean_det: Series
    mean_lam: Series
    table: list             # RqaSummary per (window, member)
    diagnostics: list


def windowed_arqa(ens: Ensemble, spec: WindowSpec = WindowSpec(), target_rr: float = 5.0,
                  l_min: int = 2, v_min: int = 2) -> ArqaResult:
    """Per-window, per-member fixed-RR quantifiers and their across-member means."""
    table, diags = [], []
    dates, det_means, lam_means = [], [], []
    Y = ens.matrix
    for w in windows(len(ens), spec, ens.calendar):
        dets, lams = [], []
        for sid, row in zip(ens.ids, Y[:, w.start:w.end]):
            try:
                eps, achieved = calibrate_epsilon(row, target_rr)
            except DegenerateDistances as exc:
                diags.append({"window": str(w.label_date), "series": sid, "reason": str(exc)})
                log.info("window %s, %s excluded: %s", w.label_date, sid, exc)
                continue
            q = recurrence_quantifiers(row, eps, l_min, v_min)
            table.append(RqaSummary(q.rr, q.det, q.lam, eps, achieved, w, sid))
            dets.append(q.det)
            lams.append(q.lam)
        dates.append(w.label_date)
        det_means.append(np.mean(dets) if dets else np.nan)
        lam_means.append(np.mean(lams) if lams else np.nan)
    if dates and np.isnan(det_means).all():
        raise DegenerateDistances("every member of every window has degenerate distances")
    if np.isnan(det_means).any():
        keep = ~np.isnan(det_means)
        dates = np.asarray(dates)[keep]
        det_means = np.asarray(det_means)[keep]
        lam_means = np.asarray(lam_means)[keep]
    return ArqaResult(Series("mean_det", dates, det_means), Series("mean_lam", dates, lam_means),
                      table, diags)
