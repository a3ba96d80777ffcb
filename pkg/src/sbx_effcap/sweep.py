"""Declarative parameter sweeps and their CSV output."""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .channel import LinkBudget, SbxParams, db_to_linear, validate
from .effcap import (
    LN2,
    ec_low_snr_approx,
    effective_capacity_exact,
    effective_capacity_high_snr,
    low_snr_characterization,
)
from .errors import ParameterDomainError
from .oracle import ec_monte_carlo, ec_quadrature
from .specfun import EvalControl

__all__ = [
    "AXES",
    "OUTPUTS",
    "SweepConfig",
    "parse_config_text",
    "load_config",
    "axis_values",
    "evaluate_point",
    "run_sweep",
    "write_csv",
    "format_float",
    "CSV_MAGIC",
    "NA",
]

AXES = ("snr_db", "theta", "a_constraint", "ebn0_db")
OUTPUTS = ("exact", "high_snr", "low_snr", "mc", "quadrature")
CSV_MAGIC = "# sbx-effcap v1"
NA = "NA"
MAX_POINTS = 10**6

_UNIT = "_ec_bits_per_s_per_hz"


def format_float(x):
    return format(float(x), ".15g")


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: an axis range plus every fixed parameter.

    ``a_constraint`` fixes A directly; otherwise A = theta * tb / ln 2.
    """

    axis: str
    start: float
    stop: float
    step: float
    m_x: float = 2.0
    omega_x: float = 2.0
    m_y: float = 10.0
    omega_y: float = 10.0
    snr_db: float = 10.0
    a_constraint: float | None = None
    theta: float | None = None
    tb: float = 1.0
    outputs: tuple = ("exact",)
    seed: int = 2024
    n_samples: int = 10**5
    shards: int = 1
    rel_tol: float = 1e-12
    out: str | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ParameterDomainError(f"axis must be one of {AXES}, got {self.axis!r}", "axis")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad or not self.outputs:
            raise ParameterDomainError(f"outputs must be drawn from {OUTPUTS}, got {self.outputs}",
                                       "outputs")
        if not self.step > 0:
            raise ParameterDomainError(f"step must be > 0, got {self.step}", "step > 0")
        if not self.start < self.stop:
            raise ParameterDomainError(
                f"empty range: from={self.start} must be < to={self.stop}", "from < to")
        if (self.stop - self.start) / self.step > MAX_POINTS:
            raise ParameterDomainError("sweep exceeds 10^6 points", "(to-from)/step <= 1e6")
        if self.axis not in ("theta", "a_constraint") and self.a_constraint is None \
                and self.theta is None:
            raise ParameterDomainError("fix the delay constraint with A or theta", "A or theta")
        if not self.tb > 0:
            raise ParameterDomainError(f"tb must be > 0, got {self.tb}", "tb > 0")
        validate(SbxParams(self.m_x, self.omega_x, self.m_y, self.omega_y))

    @property
    def params(self):
        return SbxParams(self.m_x, self.omega_x, self.m_y, self.omega_y)


_KEYS = {
    "axis": ("axis", str),
    "from": ("start", float),
    "to": ("stop", float),
    "step": ("step", float),
    "mx": ("m_x", float),
    "omega_x": ("omega_x", float),
    "my": ("m_y", float),
    "omega_y": ("omega_y", float),
    "snr_db": ("snr_db", float),
    "a": ("a_constraint", float),
    "a_constraint": ("a_constraint", float),
    "theta": ("theta", float),
    "tb": ("tb", float),
    "outputs": ("outputs", lambda s: tuple(x.strip() for x in s.split(",") if x.strip())),
    "seed": ("seed", int),
    "n_samples": ("n_samples", int),
    "shards": ("shards", int),
    "tol": ("rel_tol", float),
    "out": ("out", str),
}


def parse_config_text(text):
    """Parse the flat ``key = value`` format into SweepConfig keyword arguments."""
    kw = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterDomainError(f"config line {lineno}: expected key=value", "config syntax")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in _KEYS:
            raise ParameterDomainError(f"config line {lineno}: unknown key {key!r}", "config key")
        name, conv = _KEYS[key]
        try:
            kw[name] = conv(value)
        except ValueError as exc:
            raise ParameterDomainError(f"config line {lineno}: bad value for {key}: {value!r}",
                                       "config value") from exc
    return kw


def load_config(path, **overrides):
    with open(path) as fh:
        kw = parse_config_text(fh.read())
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig(**kw)


def axis_values(cfg):
    n = int(math.floor((cfg.stop - cfg.start) / cfg.step + 1e-9)) + 1
    return [round(cfg.start + i * cfg.step, 12) for i in range(n)]


def _point(cfg, x):
    """(SbxParams, gamma_bar, A, ebn0_linear) at axis value x."""
    snr_db, a, ebn0 = cfg.snr_db, None, None
    if cfg.axis == "snr_db":
        snr_db = x
    elif cfg.axis == "theta":
        a = x * cfg.tb / LN2
    elif cfg.axis == "a_constraint":
        a = x
    else:
        ebn0 = db_to_linear(x)
    if a is None:
        a = cfg.a_constraint if cfg.a_constraint is not None else cfg.theta * cfg.tb / LN2
    return cfg.params, db_to_linear(snr_db), a, ebn0


def columns(cfg):
    cols = [cfg.axis]
    for o in cfg.outputs:
        cols.append(o + _UNIT)
        if o == "mc":
            cols.append("mc_std_err_bits_per_s_per_hz")
    return cols


def evaluate_point(cfg, x):
    """Row of formatted fields (axis value first) for axis value ``x``."""
    p, gbar, a, ebn0 = _point(cfg, x)
    ctl = EvalControl(rel_tol=cfg.rel_tol)
    lb = LinkBudget(gbar)
    row = [format_float(x)]
    for o in cfg.outputs:
        if o == "low_snr":
            if ebn0 is None:
                row.append(NA)
            else:
                ch = low_snr_characterization(p, a, ctl)
                row.append(format_float(ec_low_snr_approx(ch, ebn0)))
            continue
        if ebn0 is not None:
            row.extend([NA, NA] if o == "mc" else [NA])
            continue
        if o == "exact":
            row.append(format_float(effective_capacity_exact(p, lb, a, ctl).ec_bits))
        elif o == "high_snr":
            row.append(format_float(effective_capacity_high_snr(p, lb, a, ctl))
                       if p.m_x > a else NA)
        elif o == "quadrature":
            row.append(format_float(ec_quadrature(p, lb, a, ctl)))
        elif o == "mc":
            est = ec_monte_carlo(p, lb, a, cfg.seed, cfg.n_samples, cfg.shards)
            row.extend([format_float(est.value), format_float(est.std_err)])
    return row


def _eval_star(args):
    return evaluate_point(*args)


def run_sweep(cfg, workers=1):
    """All rows in axis order, optionally spread over worker processes."""
    xs = axis_values(cfg)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_eval_star, [(cfg, x) for x in xs]))
    return [evaluate_point(cfg, x) for x in xs]


def write_csv(cfg, path, workers=1):
    """Write the sweep to ``path`` atomically; nothing is left behind on failure."""
    rows = run_sweep(cfg, workers)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".sweep-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(CSV_MAGIC + "\n")
            fh.write(",".join(columns(cfg)) + "\n")
            for r in rows:
                fh.write(",".join(r) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return rows

