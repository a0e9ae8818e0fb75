"""Experiment orchestration behind the CLI subcommands.

Each ``run_*`` function computes a :class:`ResultBundle` from a
:class:`RunConfig`; :func:`write_bundle` serialises it. Nothing here depends
on wall-clock time, so identical configs produce byte-identical bundles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import io
from .config import RunConfig
from .errors import FieldLengthMismatch, InputError, NumericalError, SingularRegression, TooShort
from .granger import (
    GcConfig,
    correlation_matrix,
    exceedance_fraction,
    mean_causality,
    windowed_causality,
)
from .market import (
    Epoch,
    ExternalField,
    GbmParams,
    amplitude_envelope,
    build_external_field,
    business_days,
    calibrate_from_series,
    driven_ensemble,
    simulate_gbm,
    synthetic_field,
)
from .numstat import RandomSource
from .rqa import windowed_arqa
from .series import (
    Ensemble,
    Series,
    WindowSpec,
    adf_stationarity,
    align,
    as_dates,
    ensemble_log_returns,
    windows,
)

log = logging.getLogger(__name__)

# Stream used for the synthetic field; member paths use streams 1..n_members.
FIELD_STREAM = 2**63


@dataclass
class ResultBundle:
    name: str
    config: RunConfig
    series: dict = field(default_factory=dict)      # file stem -> Series
    tables: dict = field(default_factory=dict)      # file stem -> (dates, {column: values})
    matrices: list = field(default_factory=list)    # (file stem, ids, matrix, is_integer)
    summary: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)
    rows: dict = field(default_factory=dict)        # file stem -> (header, rows)

    def metadata(self) -> dict:
        return {
            "command": self.name,
            "version": __version__,
            "config": self.config.to_dict(),
            "seeds": {"seed": self.config.seed, "field_stream": FIELD_STREAM,
                      "member_streams": "1..n_members", "beta_stream": 0},
            "conventions": {
                "window_label": "date at start + length // 2",
                "rqa_line_of_identity": "excluded",
                "rqa_recurrence": "|x_i - x_j| < epsilon",
                "rqa_epsilon": "midpoint of q-th and (q+1)-th ordered pair distance",
                "gc_sample": "first max(tau, tau_prime) points dropped for both models",
            },
        }


def write_bundle(bundle: ResultBundle, out=None) -> list[Path]:
    """Write every artefact plus a JSON sidecar carrying the full run metadata."""
    out = Path(out or bundle.config.out)
    meta = bundle.metadata()
    written = []

    def sidecar(path, extra=None):
        m = dict(meta)
        if extra:
            m.update(extra)
        io.write_json(path.with_suffix(".json"), m)
        written.extend([path, path.with_suffix(".json")])

    for stem, s in bundle.series.items():
        p = out / f"{stem}.csv"
        io.write_series_csv(p, s)
        sidecar(p)
    for stem, (dates, cols) in bundle.tables.items():
        p = out / f"{stem}.csv"
        io.write_columns_csv(p, dates, cols)
        sidecar(p)
    for stem, (header, rows) in bundle.rows.items():
        p = out / f"{stem}.csv"
        io.write_table_csv(p, header, rows)
        sidecar(p)
    for stem, ids, mat, integer, extra in bundle.matrices:
        p = out / "matrices" / f"{stem}.csv"
        io.write_matrix_csv(p, ids, mat, integer=integer)
        sidecar(p, extra)
    summary = dict(meta)
    summary["summary"] = bundle.summary
    io.write_json(out / "summary.json", summary)
    io.write_jsonl(out / "diagnostics.jsonl", bundle.diagnostics)
    written.extend([out / "summary.json", out / "diagnostics.jsonl"])
    return written


# --- helpers -----------------------------------------------------------------

def _spec(cfg):
    return WindowSpec(cfg.window, cfg.step)


def _gc(cfg):
    return GcConfig(cfg.tau, cfg.tau_prime, cfg.alpha)


def load_prices(cfg: RunConfig):
    if not cfg.inputs:
        raise InputError("no inputs given (use --input or inputs= in the config)")
    series = io.read_prices(cfg.inputs)
    ens, report = align(series, cfg.max_missing)
    diags = [{"kind": "rejected_member", "series": k, "missing_fraction": v}
             for k, v in sorted(report.rejected.items())]
    if report.dropped_dates:
        diags.append({"kind": "dropped_dates", "count": len(report.dropped_dates),
                      "dates": [str(d) for d in report.dropped_dates]})
    return ens, report, diags


def parse_epochs(text: str, calendar=None) -> list[Epoch]:
    """``start:end[:factor]`` items separated by commas.

    Bounds are increment offsets or ISO dates; dates need ``calendar`` and map
    to the first calendar position on or after them.
    """
    epochs = []
    for item in filter(None, (p.strip() for p in text.split(","))):
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise InputError(f"bad epoch {item!r}; expected start:end[:factor]")
        bounds = []
        for b in parts[:2]:
            if "-" in b:
                if calendar is None:
                    raise InputError(f"epoch bound {b!r} is a date but no calendar is available")
                bounds.append(int(np.searchsorted(as_dates(calendar), np.datetime64(b, "D"))))
            else:
                bounds.append(int(b))
        factor = float(parts[2]) if len(parts) == 3 else 1.0
        epochs.append(Epoch(bounds[0], bounds[1], factor))
    return epochs


def stationarity_diagnostics(lr: Ensemble, cfg: RunConfig) -> list[dict]:
    out = []
    for w in windows(len(lr), _spec(cfg), lr.calendar):
        for s in lr.members:
            vals = s.values[w.start:w.end]
            try:
                res = adf_stationarity(vals, cfg.adf_lag)
            except (SingularRegression, TooShort) as exc:
                out.append({"kind": "adf_failed", "window": str(w.label_date), "series": s.id,
                            "reason": str(exc)})
                continue
            if res.reject_unit_root_at not in ("1%", "5%"):
                out.append({"kind": "nonstationary_window", "window": str(w.label_date),
                            "series": s.id, "adf_statistic": res.statistic})
    return out


def _gc_analysis(lr: Ensemble, cfg: RunConfig, tag: str = ""):
    matrices = windowed_causality(lr, _spec(cfg), _gc(cfg))
    diags = []
    for cm in matrices:
        for d in cm.diagnostics:
            diags.append({"kind": "pair_skipped", "window": str(cm.window.label_date),
                          "ensemble": tag or "input", **d})
    return matrices, mean_causality(matrices), diags


def _baseline_stats(s: Series) -> dict:
    return {"mean": float(np.mean(s.values)), "sd": float(np.std(s.values, ddof=1))}


def calibrated_gbm_ensemble(prices: Ensemble, lr: Ensemble, seed: int) -> Ensemble:
    """Plain GBM paths matching each member's mean and variance, on the same calendar."""
    members = []
    for k, (p, r) in enumerate(zip(prices.members, lr.members)):
        gp = calibrate_from_series(r, x0=float(p.values[0]), seed=seed, stream_id=k + 1)
        members.append(simulate_gbm(gp, len(p) - 1, dates=p.dates, name=p.id))
    return Ensemble(tuple(members))


# --- subcommands ----------------------------------------------------------------

def run_ingest(cfg: RunConfig) -> ResultBundle:
    ens, report, diags = load_prices(cfg)
    b = ResultBundle("ingest", cfg, diagnostics=diags)
    b.tables["prices"] = (ens.calendar, {s.id: s.values for s in ens.members})
    b.summary = {"members": ens.ids, "n_dates": len(ens), "rejected": report.rejected,
                 "dropped_dates": len(report.dropped_dates),
                 "first_date": str(ens.calendar[0]), "last_date": str(ens.calendar[-1])}
    return b


def run_granger(cfg: RunConfig) -> ResultBundle:
    prices, _, diags = load_prices(cfg)
    lr = ensemble_log_returns(prices)
    b = ResultBundle("granger", cfg, diagnostics=diags)
    b.diagnostics += stationarity_diagnostics(lr, cfg)
    matrices, mean_series, gdiags = _gc_analysis(lr, cfg)
    b.diagnostics += gdiags
    b.series["mean_causality"] = mean_series
    for k, cm in enumerate(matrices):
        stem = f"w{k:03d}_{cm.window.label_date}"
        extra = {"window": {"start": cm.window.start, "end": cm.window.end,
                            "label_date": str(cm.window.label_date)}}
        b.matrices.append((f"{stem}_causality", cm.ids, cm.verdicts, True, extra))
        b.matrices.append((f"{stem}_pvalues", cm.ids, cm.p_values, False, extra))
        try:
            corr = correlation_matrix(lr.slice(cm.window.start, cm.window.end))
            b.matrices.append((f"{stem}_correlation", cm.ids, corr, False, extra))
        except NumericalError as exc:
            b.diagnostics.append({"kind": "correlation_skipped", "window": str(cm.window.label_date),
                                  "reason": str(exc)})
    b.summary["n_windows"] = len(matrices)
    b.summary["members"] = lr.ids
    if cfg.gbm_baseline:
        gbm_lr = ensemble_log_returns(calibrated_gbm_ensemble(prices, lr, cfg.seed))
        _, gbm_series, gbm_diags = _gc_analysis(gbm_lr, cfg, "gbm_baseline")
        b.diagnostics += gbm_diags
        b.series["gbm_mean_causality"] = gbm_series
        stats = _baseline_stats(gbm_series)
        b.summary["gbm_baseline"] = stats
        if stats["sd"] > 0:
            b.summary["exceedance_fraction"] = exceedance_fraction(mean_series, stats["mean"], stats["sd"])
    return b


def _rqa_into(b: ResultBundle, lr: Ensemble, cfg: RunConfig, prefix: str = ""):
    res = windowed_arqa(lr, _spec(cfg), cfg.target_rr, cfg.l_min, cfg.v_min)
    b.series[f"{prefix}mean_det"] = res.mean_det
    b.series[f"{prefix}mean_lam"] = res.mean_lam
    b.rows[f"{prefix}rqa_table"] = (
        ["window", "series", "rr", "det", "lam", "epsilon", "achieved_rr"],
        [(str(r.window.label_date), r.series_id, r.rr, r.det, r.lam, r.epsilon, r.achieved_rr)
         for r in res.table],
    )
    b.diagnostics += [{"kind": "rqa_member_excluded", "ensemble": prefix.rstrip("_") or "input", **d}
                      for d in res.diagnostics]
    return res


def run_rqa(cfg: RunConfig) -> ResultBundle:
    prices, _, diags = load_prices(cfg)
    lr = ensemble_log_returns(prices)
    b = ResultBundle("rqa", cfg, diagnostics=diags)
    res = _rqa_into(b, lr, cfg)
    b.summary = {"n_windows": len(res.mean_det), "members": lr.ids, "target_rr": cfg.target_rr,
                 "l_min": cfg.l_min, "v_min": cfg.v_min}
    return b


def field_from_config(cfg: RunConfig, n_steps: int, dates) -> ExternalField | None:
    if cfg.field == "none":
        return None
    if cfg.field == "synthetic":
        epochs = parse_epochs(cfg.epochs, dates)
        return synthetic_field(epochs, cfg.baseline_std, n_steps, RandomSource(cfg.seed, FIELD_STREAM),
                               cfg.smoothing_window, dates=dates)
    s = io.read_series_csv(cfg.field, name="field")
    if len(s) != n_steps:
        raise FieldLengthMismatch(f"field file has {len(s)} increments, simulation needs {n_steps}")
    return ExternalField.demeaned(s, cfg.smoothing_window)


def _betas(cfg: RunConfig):
    return None if cfg.beta == "uniform" else float(cfg.beta)


def run_simulate(cfg: RunConfig) -> ResultBundle:
    """Plain (``field=none``) or driven GBM ensemble on a weekday calendar."""
    dates = business_days(cfg.n_steps + 1, cfg.start_date)
    fld = field_from_config(cfg, cfg.n_steps, dates[1:])
    b = ResultBundle("simulate", cfg)
    names = [f"S{k + 1:02d}" for k in range(cfg.n_members)]
    if fld is None:
        members = []
        for k in range(cfg.n_members):
            gp = GbmParams(cfg.mu, cfg.sigma, cfg.x0, cfg.seed, k + 1)
            members.append(simulate_gbm(gp, cfg.n_steps, dates=dates, name=names[k]))
        ens = Ensemble(tuple(members))
        params = [(n, cfg.mu, cfg.sigma, 0.0) for n in names]
    else:
        ens, dps = driven_ensemble(fld, cfg.n_members, cfg.sigma, cfg.seed, mu=cfg.mu, x0=cfg.x0,
                                   betas=_betas(cfg))
        params = [(s.id, p.base.mu, p.base.sigma, p.beta) for s, p in zip(ens.members, dps)]
        b.series["field"] = fld.increments
    b.tables["prices"] = (ens.calendar, {s.id: s.values for s in ens.members})
    b.rows["params"] = (["id", "mu", "sigma", "beta", "x0", "seed", "stream_id"],
                        [(n, float(mu), float(sig), float(beta), float(cfg.x0), cfg.seed, k + 1)
                         for k, (n, mu, sig, beta) in enumerate(params)])
    b.summary = {"n_members": cfg.n_members, "n_steps": cfg.n_steps,
                 "driven": fld is not None}
    return b


def epoch_std_ratios(h: Series, epochs) -> list[float]:
    """Std of the field inside each epoch relative to its std outside all epochs."""
    mask = amplitude_envelope([Epoch(e.start, e.end, 2.0) for e in epochs], len(h)) != 1.0
    quiet = np.std(h.values[~mask], ddof=1)
    return [float(np.std(h.values[e.start:e.end], ddof=1) / quiet) for e in epochs]


def epoch_window_masks(wins, epochs):
    """Windows whose midpoint lies in each epoch, and windows touching no epoch.

    Window bounds index log-returns, which line up with field increments.
    """
    mids = np.array([w.start + (w.end - w.start) // 2 for w in wins])
    inside = [(mids >= e.start) & (mids < e.end) for e in epochs]
    quiet = np.array([not any(w.start < e.end and e.start < w.end for e in epochs) for w in wins])
    return inside, quiet


def epoch_peak_zscores(values, inside, quiet) -> list[float]:
    """Largest in-epoch value of each epoch, in out-of-epoch standard deviations."""
    v = np.asarray(values, dtype=float)
    mean, sd = v[quiet].mean(), v[quiet].std(ddof=1)
    return [float((v[m].max() - mean) / sd) if m.any() else float("nan") for m in inside]


def run_build_field(cfg: RunConfig) -> ResultBundle:
    prices, _, diags = load_prices(cfg)
    lr = ensemble_log_returns(prices)
    fld = build_external_field(lr, cfg.smoothing_window)
    b = ResultBundle("build-field", cfg, diagnostics=diags)
    b.series["field"] = fld.increments
    b.summary = {"smoothing_window": cfg.smoothing_window, "n_steps": len(fld),
                 "std": float(np.std(fld.increments.values, ddof=1))}
    try:
        epochs = parse_epochs(cfg.epochs, fld.increments.dates)
        b.summary["epoch_std_ratios"] = epoch_std_ratios(fld.increments, epochs)
    except InputError as exc:
        b.diagnostics.append({"kind": "epoch_ratio_skipped", "reason": str(exc)})
    return b


def run_replicate(cfg: RunConfig) -> ResultBundle:
    """Real (or synthetic) ensemble vs driven GBM vs plain GBM, both analyses.

    With inputs, each stock's GBM is calibrated to its log-returns and the
    field is estimated from the data. Without inputs, the synthetic field of
    the config drives ``n_members`` identical-parameter paths.
    """
    b = ResultBundle("replicate", cfg)
    analysed = {}
    if cfg.inputs:
        prices, _, diags = load_prices(cfg)
        b.diagnostics += diags
        lr = ensemble_log_returns(prices)
        analysed["real"] = lr
        fld = build_external_field(lr, cfg.smoothing_window)
        params = [calibrate_from_series(r, x0=float(p.values[0]))
                  for p, r in zip(prices.members, lr.members)]
        driven, dps = driven_ensemble(fld, len(params), 0.0, cfg.seed, betas=_betas(cfg),
                                      params=params, names=prices.ids, dates=prices.calendar)
        control = calibrated_gbm_ensemble(prices, lr, cfg.seed)
    else:
        dates = business_days(cfg.n_steps + 1, cfg.start_date)
        fld = field_from_config(cfg, cfg.n_steps, dates[1:])
        if fld is None:
            raise InputError("replicate without inputs needs field=synthetic or a field file")
        driven, dps = driven_ensemble(fld, cfg.n_members, cfg.sigma, cfg.seed, mu=cfg.mu, x0=cfg.x0,
                                      betas=_betas(cfg))
        control, _ = driven_ensemble(fld, cfg.n_members, cfg.sigma, cfg.seed, mu=cfg.mu, x0=cfg.x0,
                                     betas=0.0)
    analysed["driven"] = ensemble_log_returns(driven)
    analysed["control"] = ensemble_log_returns(control)
    b.series["field"] = fld.increments
    b.rows["params"] = (["id", "mu", "sigma", "beta"],
                        [(s.id, p.base.mu, p.base.sigma, p.beta) for s, p in zip(driven.members, dps)])

    gc_cols, det_cols, lam_cols = {}, {}, {}
    label_dates = None
    for tag, lr in analysed.items():
        _, s, d = _gc_analysis(lr, cfg, tag)
        b.diagnostics += d
        b.series[f"{tag}_mean_causality"] = s
        res = _rqa_into(b, lr, cfg, prefix=f"{tag}_")
        gc_cols[tag] = s.values
        det_cols[tag] = res.mean_det.values
        lam_cols[tag] = res.mean_lam.values
        label_dates = s.dates
        b.summary[tag] = {"mean_causality": _baseline_stats(s),
                          "mean_det": _baseline_stats(res.mean_det),
                          "mean_lam": _baseline_stats(res.mean_lam)}
    b.tables["replicate_causality"] = (label_dates, gc_cols)
    if all(len(v) == len(label_dates) for v in det_cols.values()):
        b.tables["replicate_det"] = (label_dates, det_cols)
        b.tables["replicate_lam"] = (label_dates, lam_cols)
    if "real" in analysed:
        base = b.summary["control"]["mean_causality"]
        if base["sd"] > 0:
            b.summary["exceedance_fraction"] = exceedance_fraction(
                b.series["real_mean_causality"], base["mean"], base["sd"])
    return b


RUNNERS = {
    "ingest": run_ingest,
    "granger": run_granger,
    "rqa": run_rqa,
    "simulate": run_simulate,
    "build-field": run_build_field,
    "replicate": run_replicate,
}
