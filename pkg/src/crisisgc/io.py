"""CSV/JSON readers and writers.

Inputs are either one file per ticker (a ``date`` column and a ``close`` or
``adj close`` column; the ticker is the file stem) or one wide file with a
``date`` column followed by one column per ticker. Outputs use ISO dates,
reals with 12 significant digits and ``\\n`` line endings.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import EmptyEnsemble, InputError, ParseError
from .series import Ensemble, Series

MISSING = {"", "null", "nan", "na", "n/a"}


def fmt(x) -> str:
    x = float(x)
    if np.isnan(x):
        return "nan"
    out = format(x, ".12g")
    return "0" if out == "-0" else out


def _parse_date(text, path, lineno):
    try:
        return np.datetime64(text.strip(), "D")
    except ValueError:
        raise ParseError(path, lineno, f"bad date {text!r}") from None


def _parse_value(text, path, lineno):
    t = text.strip()
    if t.lower() in MISSING:
        return None
    try:
        v = float(t)
    except ValueError:
        raise ParseError(path, lineno, f"bad number {t!r}") from None
    if not np.isfinite(v):
        raise ParseError(path, lineno, f"non-finite number {t!r}")
    return v


def _series_from_rows(name, rows, path):
    rows.sort(key=lambda r: r[0])
    dates = [r[0] for r in rows]
    for k in range(1, len(dates)):
        if dates[k] == dates[k - 1]:
            raise ParseError(path, rows[k][2], f"duplicate date {dates[k]}")
    if not rows:
        raise ParseError(path, 1, f"no observations for {name}")
    return Series(name, dates, [r[1] for r in rows])


def read_price_file(path) -> list[Series]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "empty file") from None
        cols = [h.strip().lower() for h in header]
        if not cols or cols[0] != "date":
            raise ParseError(path, 1, "first column must be 'date'")
        if "adj close" in cols or "close" in cols:
            value_col = cols.index("adj close") if "adj close" in cols else cols.index("close")
            names = [path.stem]
            value_cols = [value_col]
        else:
            names = [h.strip() for h in header[1:]]
            value_cols = list(range(1, len(header)))
            if not names:
                raise ParseError(path, 1, "no ticker columns")
        per = [[] for _ in names]
        for lineno, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(path, lineno, f"expected {len(header)} fields, got {len(row)}")
            d = _parse_date(row[0], path, lineno)
            for k, c in enumerate(value_cols):
                v = _parse_value(row[c], path, lineno)
                if v is not None:
                    per[k].append((d, v, lineno))
    return [_series_from_rows(n, rows, path) for n, rows in zip(names, per)]


def price_paths(inputs) -> list[Path]:
    out = []
    for p in inputs:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(p.glob("*.csv")))
        elif p.exists():
            out.append(p)
        else:
            raise InputError(f"input path {p} does not exist")
    if not out:
        raise EmptyEnsemble("no input CSV files found")
    return out


def read_prices(inputs) -> list[Series]:
    series = []
    for path in price_paths(inputs):
        series.extend(read_price_file(path))
    ids = [s.id for s in series]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise InputError(f"ticker(s) appear in more than one input: {dupes}")
    return series


def read_series_csv(path, name=None) -> Series:
    """Two-column ``date,value`` file."""
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) != 2 or header[0].strip().lower() != "date":
            raise ParseError(path, 1, "expected header 'date,value'")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(path, lineno, f"expected 2 fields, got {len(row)}")
            v = _parse_value(row[1], path, lineno)
            if v is None:
                raise ParseError(path, lineno, "missing value")
            rows.append((_parse_date(row[0], path, lineno), v, lineno))
    return _series_from_rows(name or path.stem, rows, path)


def _write_lines(path, lines):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("".join(line + "\n" for line in lines))


def write_series_csv(path, series: Series):
    _write_lines(path, ["date,value"] + [f"{d},{fmt(v)}" for d, v in zip(series.dates, series.values)])


def write_columns_csv(path, dates, columns: dict):
    names = list(columns)
    lines = ["date," + ",".join(names)]
    for k, d in enumerate(dates):
        lines.append(f"{d}," + ",".join(fmt(columns[n][k]) for n in names))
    _write_lines(path, lines)


def write_ensemble_csv(path, ens: Ensemble):
    write_columns_csv(path, ens.calendar, {s.id: s.values for s in ens.members})


def write_matrix_csv(path, ids, matrix, integer=False):
    lines = ["id," + ",".join(ids)]
    for i, row in zip(ids, np.asarray(matrix)):
        cells = [str(int(v)) for v in row] if integer else [fmt(v) for v in row]
        lines.append(f"{i}," + ",".join(cells))
    _write_lines(path, lines)


def read_matrix_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    ids = rows[0][1:]
    return ids, np.array([[float(c) for c in r[1:]] for r in rows[1:]])


def write_table_csv(path, header, rows):
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(fmt(c) if isinstance(c, (float, np.floating)) else str(c) for c in r))
    _write_lines(path, lines)


def _jsonable(o):
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.datetime64):
        return str(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o)}")


def write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)
    _write_lines(path, [text])


def write_jsonl(path, records):
    _write_lines(path, [json.dumps(r, sort_keys=True, default=_jsonable) for r in records])
