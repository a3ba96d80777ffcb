"""Shadowed Beaulieu-Xie (SBX) channel model.

Multipath follows the Beaulieu-Xie envelope (a normalized noncentral chi
law with ``2 m_x`` degrees of freedom), and the LOS amplitude driving its
noncentrality is itself Nakagami-m shadowed.  The instantaneous SNR is
``gamma = gamma_bar * R**2 / C`` where ``C`` is the mean-square envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError
from .specfun import (
    DEFAULT_CONTROL,
    gauss_2f1,
    log_gamma,
    log_gauss_2f1,
    log_kummer_1f1_array,
)

__all__ = [
    "SbxParams",
    "LinkBudget",
    "DerivedConstants",
    "validate",
    "derived_constants",
    "normalization_c",
    "pdf_envelope",
    "pdf_snr",
    "log_pdf_snr",
    "moment1",
    "moment2",
    "sample_snr",
    "db_to_linear",
    "linear_to_db",
]


def db_to_linear(db):
    out = 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


def linear_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class SbxParams:
    """Multipath (m_x, omega_x) and shadowing (m_y, omega_y) parameters."""

    m_x: float
    omega_x: float
    m_y: float
    omega_y: float


@dataclass(frozen=True)
class LinkBudget:
    """Average received SNR, linear."""

    gamma_bar: float

    def __post_init__(self):
        if not self.gamma_bar > 0:
            raise ParameterDomainError(
                f"gamma_bar must be > 0, got {self.gamma_bar}", "gamma_bar > 0")

    @classmethod
    def from_db(cls, snr_db):
        return cls(db_to_linear(float(snr_db)))


@dataclass(frozen=True)
class DerivedConstants:
    c_norm: float
    beta: float
    w_frac: float
    z_arg: float
    prefactor_log: float


def validate(p):
    """Return ``p`` unchanged if every parameter invariant holds."""
    checks = (
        (p.m_x >= 0.5, "m_x >= 0.5", p.m_x),
        (p.m_y >= 0.5, "m_y >= 0.5", p.m_y),
        (p.omega_x > 0, "omega_x > 0", p.omega_x),
        (p.omega_y > 0, "omega_y > 0", p.omega_y),
    )
    for ok, rule, value in checks:
        if not (ok and math.isfinite(value)):
            raise ParameterDomainError(f"invalid SBX parameter: need {rule}, got {value}", rule)
    return p


def _mix(p):
    """(w_frac, ln(1 - w_frac)) with 1 - w_frac = m_y omega_x / (m_x omega_y + m_y omega_x)."""
    den = p.m_x * p.omega_y + p.m_y * p.omega_x
    w = p.m_x * p.omega_y / den
    return w, math.log(p.m_y * p.omega_x / den)


def normalization_c(p, ctl=DEFAULT_CONTROL):
    """Mean-square envelope C = E[R^2].

    Evaluated from the 2F1 closed form; the m_x factor from
    Gamma(m_x+1)/Gamma(m_x) cancels against omega_x/m_x.
    """
    validate(p)
    w, log_pw = _mix(p)
    return p.omega_x * math.exp(p.m_y * log_pw + log_gauss_2f1(p.m_x + 1.0, p.m_y, p.m_x, w, ctl))


def derived_constants(p, lb, ctl=DEFAULT_CONTROL):
    validate(p)
    c = normalization_c(p, ctl)
    w, log_pw = _mix(p)
    beta = p.m_x * c / (lb.gamma_bar * p.omega_x)
    return DerivedConstants(
        c_norm=c, beta=beta, w_frac=w, z_arg=beta * w, prefactor_log=p.m_y * log_pw)


def pdf_envelope(p, r, ctl=DEFAULT_CONTROL):
    """Composite SBX envelope density f_R(r)."""
    validate(p)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ParameterDomainError("pdf_envelope requires r >= 0", "r >= 0")
    w, log_pw = _mix(p)
    k = p.m_x * w / p.omega_x  # coefficient of r^2 in the 1F1 argument
    lead = (math.log(2.0) - log_gamma(p.m_x) + p.m_y * log_pw
            + p.m_x * math.log(p.m_x / p.omega_x))
    out = np.zeros_like(r)
    pos = r > 0
    r2 = r[pos] ** 2
    out[pos] = np.exp(lead + (2.0 * p.m_x - 1.0) * np.log(r[pos]) - p.m_x / p.omega_x * r2
                      + log_kummer_1f1_array(p.m_y, p.m_x, k * r2, ctl))
    if p.m_x == 0.5:
        out[~pos] = math.exp(lead)
    return out if out.ndim else float(out)


def log_pdf_snr(p, lb, gamma, ctl=DEFAULT_CONTROL):
    """ln f_gamma(gamma) for gamma > 0.

    The e^{-beta gamma} 1F1(m_y; m_x; z gamma) product is formed in the log
    domain, so large arguments cannot overflow.
    """
    dc = derived_constants(p, lb, ctl)
    g = np.asarray(gamma, dtype=float)
    lead = dc.prefactor_log - log_gamma(p.m_x) + p.m_x * math.log(dc.beta)
    return (lead + (p.m_x - 1.0) * np.log(g) - dc.beta * g
            + log_kummer_1f1_array(p.m_y, p.m_x, dc.z_arg * g, ctl))


def pdf_snr(p, lb, gamma, ctl=DEFAULT_CONTROL):
    """Instantaneous-SNR density f_gamma(gamma) of the SBX channel."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ParameterDomainError("pdf_snr requires gamma >= 0", "gamma >= 0")
    out = np.zeros_like(g)
    pos = g > 0
    if np.any(pos):
        out[pos] = np.exp(log_pdf_snr(p, lb, g[pos], ctl))
    if np.any(~pos):
        validate(p)
        if p.m_x == 1.0:
            dc = derived_constants(p, lb, ctl)
            out[~pos] = math.exp(dc.prefactor_log + math.log(dc.beta))
        elif p.m_x < 1.0:
            out[~pos] = math.inf
    return out if out.ndim else float(out)


def moment1(p, lb, ctl=DEFAULT_CONTROL):
    """Closed-form E[gamma]."""
    validate(p)
    w, log_pw = _mix(p)
    c = normalization_c(p, ctl)
    return math.exp(p.m_y * log_pw) * (lb.gamma_bar * p.omega_x / c) * gauss_2f1(
        p.m_y, p.m_x + 1.0, p.m_x, w, ctl)


def moment2(p, lb, ctl=DEFAULT_CONTROL):
    """Closed-form E[gamma^2]."""
    validate(p)
    w, log_pw = _mix(p)
    c = normalization_c(p, ctl)
    return ((p.m_x + 1.0) / p.m_x * math.exp(p.m_y * log_pw)
            * (lb.gamma_bar * p.omega_x / c) ** 2
            * gauss_2f1(p.m_y, p.m_x + 2.0, p.m_x, w, ctl))


def _draw_r2(p, rng, n):
    y2 = rng.gamma(p.m_y, p.omega_y / p.m_y, n)
    sigma2 = p.omega_x / (2.0 * p.m_x)
    k = rng.poisson(y2 / (2.0 * sigma2))
    # noncentral chi-square with 2 m_x dof as a Poisson mixture of central ones
    x = rng.gamma(p.m_x + k, 2.0)
    return sigma2 * x


def shard_counts(n, shards):
    base, extra = divmod(int(n), int(shards))
    return [base + (1 if i < extra else 0) for i in range(shards)]


def sample_snr(p, lb, seed, n, shards=1, ctl=DEFAULT_CONTROL):
    """Draw ``n`` i.i.d. SNR samples.

    Shard ``i`` uses the i-th child of ``SeedSequence(seed)``; shards are
    concatenated in index order, so output depends only on (seed, n, shards).
    """
    validate(p)
    n = int(n)
    if n < 1:
        raise ParameterDomainError(f"n must be >= 1, got {n}", "n >= 1")
    if shards < 1:
        raise ParameterDomainError(f"shards must be >= 1, got {shards}", "shards >= 1")
    c = normalization_c(p, ctl)
    children = np.random.SeedSequence(int(seed)).spawn(int(shards))
    parts = [_draw_r2(p, np.random.Generator(np.random.PCG64(ss)), cnt)
             for ss, cnt in zip(children, shard_counts(n, shards))]
    return lb.gamma_bar * np.concatenate(parts) / c
