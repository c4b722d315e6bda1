"""Sweep configuration, execution, caching and CSV / plot-data output.

Config files are TOML::

    curve = { name = "parabola" }          # or { poly = ["0", "0", "1"], eta = 1, xi = 2, theta = 0.75 }
    mode = "full"                          # full | tilde
    theta = 0.75                           # optional, defaults to the curve's
    epsilon = 0.05
    regime_c = 1.0
    workers = 1
    enforce_admissible = false
    csv = "sweep.csv"
    cache_dir = ".nearcurve-cache"         # or $NEARCURVE_CACHE

    [Q_grid]
    base = 256
    factor = 2
    count = 8

    [delta]
    schedule = "power"                     # fixed: delta = c ; power: delta = c * Q^(-gamma)
    c = 1.0
    gamma = 0.4
"""

from dataclasses import asdict, dataclass, fields
import csv
import hashlib
import json
import logging
import math
import os
from pathlib import Path
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .asymptotics import RegimeParams, admissible_delta, choose_K, error_bound, main_term, regime
from .curve import from_spec
from .lattice_count import CountQuery, count

log = logging.getLogger(__name__)

CODE_VERSION = f"{__version__}+count1"
CACHE_ENV = "NEARCURVE_CACHE"


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    curve: object = "parabola"
    Q_base: float = 256.0
    Q_factor: float = 2.0
    Q_count: int = 8
    delta_schedule: str = "fixed"
    delta_c: float = 0.1
    delta_gamma: float = 0.0
    mode: str = "full"
    theta: float = None
    epsilon: float = 0.05
    regime_c: float = 1.0
    workers: int = 1
    csv: str = None
    cache_dir: str = None
    enforce_admissible: bool = False

    def Q_grid(self):
        if self.Q_count < 0 or self.Q_factor <= 1:
            raise ConfigError("Q_grid needs count >= 0 and factor > 1")
        return [self.Q_base * self.Q_factor ** i for i in range(self.Q_count)]

    def delta_for(self, Q):
        if self.delta_schedule == "fixed":
            return self.delta_c
        if self.delta_schedule == "power":
            return self.delta_c * Q ** (-self.delta_gamma)
        raise ConfigError(f"unknown delta schedule {self.delta_schedule!r}")

    def describe_schedule(self):
        if self.delta_schedule == "fixed":
            return f"delta = {self.delta_c}"
        return f"delta = {self.delta_c} * Q^(-{self.delta_gamma})"


def load_config(path, **overrides):
    """Read a TOML sweep config; keyword overrides (not None) win over the file."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    return config_from_mapping(raw, **overrides)


def config_from_mapping(raw, **overrides):
    raw = dict(raw)
    kw = {}
    grid = raw.pop("Q_grid", {})
    for k in ("base", "factor", "count"):
        if k in grid:
            kw[f"Q_{k}"] = grid[k]
    sched = raw.pop("delta", {})
    if isinstance(sched, dict):
        if "schedule" in sched:
            kw["delta_schedule"] = sched["schedule"]
        if "c" in sched:
            kw["delta_c"] = float(sched["c"])
        if "gamma" in sched:
            kw["delta_gamma"] = float(sched["gamma"])
    else:
        kw["delta_c"] = float(sched)
    names = {f.name for f in fields(SweepConfig)}
    for k, v in raw.items():
        if k not in names:
            raise ConfigError(f"unknown config key {k!r}")
        kw[k] = v
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig(**kw)


@dataclass
class SweepRecord:
    curve_id: str
    mode: str
    Q: float
    delta: float
    count: int
    main: float
    error: float
    regime: int
    K: int
    bound_value: float
    ratio: float
    elapsed: float

    @classmethod
    def from_row(cls, row):
        conv = {f.name: f.type for f in fields(cls)}
        out = {}
        for k, v in row.items():
            t = conv[k]
            out[k] = t(v)
        return cls(**out)


CSV_FIELDS = [f.name for f in fields(SweepRecord)]


def write_records(path, records):
    """CSV with one row per record; floats are written with ``repr`` so they round-trip.

    ``path`` may also be an open text file.
    """
    if hasattr(path, "write"):
        _write_rows(path, records)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(fh, records)


def _write_rows(fh, records):
    w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
    w.writeheader()
    for r in records:
        w.writerow({k: repr(float(v)) if isinstance(v, float) else v for k, v in asdict(r).items()})


def read_records(path):
    with open(path, newline="") as fh:
        return [SweepRecord.from_row(row) for row in csv.DictReader(fh)]


def cache_dir_from_env(explicit=None):
    d = explicit or os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def _cache_path(cache_dir, curve, mode, Q, delta):
    key = json.dumps([curve.key, mode, repr(float(Q)), repr(float(delta)), CODE_VERSION])
    return cache_dir / f"{hashlib.sha1(key.encode()).hexdigest()}.json"


def _record(curve, cfg, Q, delta, n, elapsed):
    theta = cfg.theta if cfg.theta is not None else curve.theta
    main = main_term(curve.eta, curve.xi, Q, delta, cfg.mode)
    reg, K, bound = 0, 0, math.nan
    if Q > 1:
        params = RegimeParams(theta, Q, delta, cfg.epsilon, cfg.regime_c)
        reg = regime(params)
        bound = error_bound(params)
        try:
            K = choose_K(params).K
        except ValueError:
            K = 0
    return SweepRecord(curve.id, cfg.mode, float(Q), float(delta), n, main, n - main, reg, K, bound,
                       n / main if main > 0 else math.nan, elapsed)


def run_sweep(cfg, curve=None):
    """One record per grid point; counts are cached and the CSV is written when configured."""
    curve = curve or from_spec(cfg.curve)
    cache = cache_dir_from_env(cfg.cache_dir)
    if cache:
        cache.mkdir(parents=True, exist_ok=True)
    records = []
    for Q in cfg.Q_grid():
        delta = cfg.delta_for(Q)
        try:
            theta = cfg.theta if cfg.theta is not None else curve.theta
            if cfg.enforce_admissible and not admissible_delta(RegimeParams(theta, Q, delta, cfg.epsilon)):
                raise ConfigError(f"delta={delta:.6g} not admissible at Q={Q:.6g}")
            path = cache and _cache_path(cache, curve, cfg.mode, Q, delta)
            if path and path.exists():
                rec = SweepRecord(**json.loads(path.read_text()))
            else:
                t0 = time.perf_counter()
                n = count(curve, CountQuery(Q, delta, cfg.mode), cfg.workers).count
                rec = _record(curve, cfg, Q, delta, n, time.perf_counter() - t0)
                if path:
                    path.write_text(json.dumps(asdict(rec)))
            records.append(rec)
        except Exception as exc:  # per-point failure, keep going
            log.warning("sweep point Q=%s delta=%s failed: %s", Q, delta, exc)
    if cfg.csv:
        write_records(cfg.csv, records)
    return records


def emit_plot_data(records, kind, path, schedule=""):
    """Whitespace-separated two-column file: ``log2 Q, ratio`` or ``ln Q, ln|E|``."""
    if not records:
        raise ValueError("no records to plot")
    curves = {r.curve_id for r in records}
    if len(curves) > 1:
        raise ValueError(f"one curve per plot file, got {sorted(curves)}")
    lines = [f"# curve {records[0].curve_id} mode {records[0].mode} {schedule}".rstrip()]
    if kind == "ratio":
        lines.append("# log2(Q) ratio")
        lines += [f"{math.log2(r.Q):.10g} {r.ratio:.10g}" for r in records]
    elif kind == "error-loglog":
        lines.append("# ln(Q) ln|E|")
        for r in records:
            if r.error == 0:
                lines.append(f"# omitted Q={r.Q:.10g}: E = 0")
            else:
                lines.append(f"{math.log(r.Q):.10g} {math.log(abs(r.error)):.10g}")
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    Path(path).write_text("\n".join(lines) + "\n")
    return path
