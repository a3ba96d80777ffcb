"""Effective capacity of the SBX channel.

R(A) = -(1/A) log2 E[(1 + gamma)^(-A)], with A = theta T B / ln 2.

The exact value expands the 1F1 in the SNR density term by term; each term
integrates against (1 + gamma)^(-A) to a Tricomi U function, giving

    E = Gamma(m_y)^-1 (1 - w)^m_y beta^m_x
        * sum_d Gamma(m_y + d) z^d / d! * U(m_x + d; m_x + d + 1 - A; beta)

with beta = m_x C / (gamma_bar omega_x), w = m_x omega_y / (m_x omega_y + m_y omega_x)
and z = beta w.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import LinkBudget, derived_constants, moment1, moment2, validate
from .errors import (
    DegenerateError,
    DomainError,
    InapplicableBoundError,
    NonConvergenceError,
    ParameterDomainError,
)
from .specfun import DEFAULT_CONTROL, log_gamma, log_gauss_2f1, log_tricomi_u

__all__ = [
    "DelaySpec",
    "EcResult",
    "LowSnrChar",
    "series_term",
    "log_series_term",
    "truncation_bound",
    "certified_truncation_bound",
    "effective_capacity_exact",
    "effective_capacity_high_snr",
    "low_snr_characterization",
    "ec_low_snr_approx",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class DelaySpec:
    """QoS delay exponent, block length and bandwidth with A = theta T B / ln 2.

    Build with :meth:`from_theta` or :meth:`from_a`; the library works on A.
    """

    theta: float
    block_T: float
    bandwidth_B: float
    a_constraint: float

    def __post_init__(self):
        for name in ("theta", "block_T", "bandwidth_B", "a_constraint"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ParameterDomainError(f"{name} must be positive, got {v}", f"{name} > 0")
        a = self.theta * self.block_T * self.bandwidth_B / LN2
        if abs(a - self.a_constraint) > 1e-15 * self.a_constraint:
            raise ParameterDomainError(
                "a_constraint does not match theta*T*B/ln 2", "A = theta T B / ln 2")

    @classmethod
    def from_theta(cls, theta, block_T=1.0, bandwidth_B=1.0):
        return cls(theta, block_T, bandwidth_B, theta * block_T * bandwidth_B / LN2)

    @classmethod
    def from_a(cls, a):
        """Delay spec with T = B = 1 and theta chosen so that A is exactly ``a``."""
        a = float(a)
        if not a > 0:
            raise ParameterDomainError(f"A must be positive, got {a}", "A > 0")
        return cls(a * LN2, 1.0, 1.0, a)


def as_delay(ds):
    """Accept a :class:`DelaySpec` or a bare A value."""
    return ds if isinstance(ds, DelaySpec) else DelaySpec.from_a(ds)


@dataclass(frozen=True)
class EcResult:
    """Exact effective capacity with its truncation bookkeeping.

    ``trunc_bound`` bounds the absolute truncation error of the expectation
    E[(1+gamma)^-A] (series tail times the leading prefactor).
    """

    ec_bits: float
    terms_used: int
    trunc_bound: float
    bound_certified: bool
    expectation: float


@dataclass(frozen=True)
class LowSnrChar:
    s0: float
    ebn0_min: float

    @property
    def ebn0_min_db(self):
        return 10.0 * math.log10(self.ebn0_min)


def _check_a(a):
    if not (a > 0 and math.isfinite(a)):
        raise ParameterDomainError(f"A must be positive, got {a}", "A > 0")


def _log_prefactor(p, dc):
    return -log_gamma(p.m_y) + dc.prefactor_log + p.m_x * math.log(dc.beta)


def _log_term(d, p, dc, a, ctl):
    return (log_gamma(p.m_y + d) + d * math.log(dc.z_arg) - math.lgamma(d + 1.0)
            + log_tricomi_u(p.m_x + d, p.m_x + d + 1.0 - a, dc.beta, ctl))


def log_series_term(d, p, lb, a, ctl=DEFAULT_CONTROL):
    """ln of the d-th summand Gamma(m_y+d) z^d / d! U(m_x+d; m_x+d+1-A; beta)."""
    if d < 0:
        raise DomainError(f"term index must be >= 0, got {d}")
    _check_a(a)
    return _log_term(int(d), p, derived_constants(p, lb, ctl), a, ctl)


def series_term(d, p, lb, a, ctl=DEFAULT_CONTROL):
    return math.exp(log_series_term(d, p, lb, a, ctl))


def _log_tail_factor(d, p, arg, ctl):
    # sum_g (1)_g (m_y+d)_g / (g! (d+1)_g) arg^g
    return log_gauss_2f1(1.0, p.m_y + d, d + 1.0, arg, ctl)


def truncation_bound(D, p, lb, a, ctl=DEFAULT_CONTROL):
    """Closed-form tail bound after D terms, with the hypergeometric factor at z.

    Returns  t_D * 2F1(1, m_y + D; D + 1; z)  where t_D is the D-th summand.
    It relies on U(m_x+D+g; ...; beta) being nonincreasing in g, which
    holds only for beta >= 1 (see :func:`certified_truncation_bound`).
    Raises :class:`InapplicableBoundError` when z >= 1.
    """
    if D < 1:
        raise DomainError(f"D must be >= 1, got {D}")
    _check_a(a)
    dc = derived_constants(p, lb, ctl)
    if not dc.z_arg < 1.0:
        raise InapplicableBoundError(f"bound needs z < 1, got z = {dc.z_arg:.6g}")
    return math.exp(_log_term(D, p, dc, a, ctl) + _log_tail_factor(D, p, dc.z_arg, ctl))


def certified_truncation_bound(D, p, lb, a, ctl=DEFAULT_CONTROL):
    """Tail bound after D terms valid for every parameter set.

    U(c+1; c+2-A; beta) / U(c; c+1-A; beta) = E[t]/c under a gamma(c, beta)
    law reweighted by the decreasing factor (1+t)^-A, which is at most
    1/beta.  Hence U at index D+g is at most U at D times beta^-g and the
    tail is bounded by  t_D * 2F1(1, m_y + D; D + 1; w)  with w = z/beta < 1.
    """
    if D < 0:
        raise DomainError(f"D must be >= 0, got {D}")
    _check_a(a)
    dc = derived_constants(p, lb, ctl)
    return math.exp(_log_term(D, p, dc, a, ctl) + _log_tail_factor(D, p, dc.w_frac, ctl))


def effective_capacity_exact(p, lb, ds, ctl=DEFAULT_CONTROL, stopping="certified"):
    """Effective capacity in bits/s/Hz from the truncated series.

    ``stopping="certified"`` stops at the first D whose certified tail bound
    is below ``rel_tol`` times the partial sum.  ``stopping="z-bound"`` uses the
    bound with the hypergeometric factor at z when z < 1, and otherwise three
    consecutive terms below ``rel_tol`` times the partial sum.
    """
    if stopping not in ("certified", "z-bound"):
        raise ValueError(f"unknown stopping rule {stopping!r}")
    validate(p)
    ds = as_delay(ds)
    a = ds.a_constraint
    dc = derived_constants(p, lb, ctl)
    log_tol = math.log(ctl.rel_tol)
    use_z_bound = stopping == "z-bound" and dc.z_arg < 1.0
    tail_arg = dc.w_frac if stopping == "certified" else dc.z_arg

    log_s = -math.inf
    small_run = 0
    last_lt = -math.inf
    for d in range(ctl.max_terms):
        lt = _log_term(d, p, dc, a, ctl)
        if d >= 1:
            if stopping == "certified" or use_z_bound:
                log_bound = lt + _log_tail_factor(d, p, tail_arg, ctl)
                if log_bound <= log_tol + log_s:
                    return _finish(p, dc, a, log_s, d, log_bound, True)
            else:
                if small_run >= 3:
                    return _finish(p, dc, a, log_s, d, last_lt, False)
        small_run = small_run + 1 if lt <= log_tol + np.logaddexp(log_s, lt) else 0
        log_s = np.logaddexp(log_s, lt)
        last_lt = lt
    raise NonConvergenceError(
        f"effective_capacity_exact: no convergence within {ctl.max_terms} terms")


def _finish(p, dc, a, log_s, d, log_bound, certified):
    log_pref = _log_prefactor(p, dc)
    log_e = log_pref + float(log_s)
    if log_e > 0.0:
        warnings.warn("expectation rounded above 1; clamping effective capacity to 0",
                      RuntimeWarning, stacklevel=3)
        log_e = 0.0
    ec = -log_e / (a * LN2)
    return EcResult(
        ec_bits=max(ec, 0.0),
        terms_used=d,
        trunc_bound=math.exp(log_pref + log_bound),
        bound_certified=certified,
        expectation=math.exp(log_e),
    )


def effective_capacity_high_snr(p, lb, ds, ctl=DEFAULT_CONTROL):
    """High-SNR asymptote obtained with (1 + gamma)^-A ~ gamma^-A; needs m_x > A."""
    validate(p)
    a = as_delay(ds).a_constraint
    if not p.m_x - a > 0:
        raise ParameterDomainError(
            f"high-SNR asymptote requires m_x > A (m_x={p.m_x}, A={a})", "m_x > A")
    dc = derived_constants(p, lb, ctl)
    log_e = (log_gamma(p.m_x - a) - log_gamma(p.m_x) + dc.prefactor_log
             + a * math.log(dc.beta)
             + log_gauss_2f1(p.m_y, p.m_x - a, p.m_x, dc.w_frac, ctl))
    return -log_e / (a * LN2)


def low_snr_characterization(p, ds, ctl=DEFAULT_CONTROL):
    """Wideband slope and minimum energy per bit from the first two SNR moments.

    Moments are taken per unit average SNR.
    """
    a = as_delay(ds).a_constraint
    unit = LinkBudget(1.0)
    m1 = moment1(p, unit, ctl)
    m2 = moment2(p, unit, ctl)
    den = (a + 1.0) * m2 - a * m1 * m1
    if not den > 0:
        raise DegenerateError(f"(A+1)E[g^2] - A E[g]^2 = {den} is not positive")
    return LowSnrChar(s0=2.0 * m1 * m1 / den, ebn0_min=LN2 / m1)


def ec_low_snr_approx(ch, ebn0):
    """S0 log2(Eb/N0 / (Eb/N0)min), clamped at zero below the minimum energy per bit."""
    e = np.asarray(ebn0, dtype=float)
    if np.any(~(e > 0)):
        raise DomainError("Eb/N0 must be positive")
    out = np.maximum(0.0, ch.s0 * np.log2(e / ch.ebn0_min))
    return float(out) if out.ndim == 0 else out
