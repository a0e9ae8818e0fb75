"""Run configuration: a flat ``key=value`` file, overridable from the command line."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import InputError

# Synthetic crisis scenario on the 2000-01-03 .. 2021-12-31 weekday calendar:
# Aug 2007 - Jun 2009 and 20 Feb - 24 Sep 2020, as increment offsets.
DEFAULT_EPOCHS = "1976:2476:5,5252:5400:8"


@dataclass(frozen=True)
class RunConfig:
    # windows and Granger tests
    window: int = 252
    step: int = 63
    tau: int = 5
    tau_prime: int = 5
    alpha: float = 0.05
    # recurrence analysis
    target_rr: float = 5.0
    l_min: int = 2
    v_min: int = 2
    # external field
    smoothing_window: int = 11
    epochs: str = DEFAULT_EPOCHS
    baseline_std: float = 0.008
    field: str = "synthetic"           # "synthetic", "none", or a field CSV path
    # simulation
    seed: int = 0
    n_members: int = 27
    n_steps: int = 5739
    mu: float = 0.0002
    sigma: float = 0.02
    beta: str = "uniform"              # "uniform" or a number in [0, 1]
    x0: float = 100.0
    start_date: str = "2000-01-03"
    # data and checks
    inputs: tuple = ()
    max_missing: float = 0.05
    adf_lag: int = 1
    gbm_baseline: bool = True
    out: str = "results"

    def __post_init__(self):
        if self.window < 2 or self.step < 1:
            raise InputError("window must be >= 2 and step >= 1")
        if self.tau < 1 or self.tau_prime < 1:
            raise InputError("tau and tau_prime must be >= 1")
        if not 0 < self.alpha < 1:
            raise InputError("alpha must lie in (0, 1)")
        if not 0 < self.target_rr < 100:
            raise InputError("target_rr must lie in (0, 100)")
        if self.l_min < 2 or self.v_min < 2:
            raise InputError("l_min and v_min must be >= 2")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise InputError("smoothing_window must be a positive odd integer")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        if self.beta != "uniform":
            b = float(self.beta)
            if not 0.0 <= b <= 1.0:
                raise InputError("beta must be 'uniform' or a number in [0, 1]")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["inputs"] = list(self.inputs)
        return d

    def to_text(self) -> str:
        return "".join(f"{k}={_format(v)}\n" for k, v in self.to_dict().items())

    @classmethod
    def from_dict(cls, values: dict, base: "RunConfig | None" = None) -> "RunConfig":
        base = base or cls()
        types = {f.name: f.type for f in fields(cls)}
        updates = {}
        for key, raw in values.items():
            name = key.strip().replace("-", "_")
            if name not in types:
                raise InputError(f"unknown config key {key!r}")
            updates[name] = _coerce(name, types[name], raw)
        return dataclasses.replace(base, **updates)

    @classmethod
    def from_text(cls, text: str, base: "RunConfig | None" = None) -> "RunConfig":
        return cls.from_dict(parse_key_values(text), base)

    @classmethod
    def from_file(cls, path, base: "RunConfig | None" = None) -> "RunConfig":
        return cls.from_text(Path(path).read_text(), base)


def parse_key_values(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(v)
    return str(v)


def _coerce(name, typ, raw):
    typ = typ if isinstance(typ, str) else typ.__name__
    if not isinstance(raw, str):
        if typ == "tuple":
            return tuple(raw)
        if typ == "float" and isinstance(raw, int) and not isinstance(raw, bool):
            return float(raw)
        return raw
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        if typ == "bool":
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if typ == "tuple":
            return tuple(p.strip() for p in raw.split(",") if p.strip())
    except ValueError:
        raise InputError(f"config key {name}: cannot parse {raw!r} as {typ}") from None
    return raw
