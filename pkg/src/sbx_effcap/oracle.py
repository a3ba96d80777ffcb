"""Independent checks on the series: direct quadrature and Monte-Carlo.

The quadrature integrates (1+gamma)^-A against the SNR density itself (a
1F1 expression), never touching the Tricomi-U series.  The Monte-Carlo
estimators only use the channel sampler.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .channel import derived_constants, log_pdf_snr, sample_snr, validate
from .effcap import LN2, as_delay
from .errors import NonConvergenceError, ParameterDomainError
from .specfun import DEFAULT_CONTROL, log_gamma

__all__ = [
    "McEstimate",
    "expectation_quadrature",
    "ec_quadrature",
    "ec_monte_carlo",
    "ergodic_capacity_mc",
]

MIN_MC_SAMPLES = 1000


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_err: float
    n: int
    seed: int
    shards: int = 1


def _log_integrand(p, lb, a, ctl):
    def f(g):
        return log_pdf_snr(p, lb, g, ctl) - a * np.log1p(g)
    return f


def expectation_quadrature(p, lb, a, ctl=DEFAULT_CONTROL):
    """E[(1+gamma)^-A] by adaptive quadrature of the density.

    [0, g1] is integrated with an algebraic weight gamma^(m_x-1) (QAWS) so
    the m_x < 1 singularity is exact; [g1, g_cut] adaptively; and the tail
    beyond g_cut through gamma = g_cut - ln(u)/rate, where rate =
    beta (1 - w) is the density's exponential decay.
    """
    validate(p)
    dc = derived_constants(p, lb, ctl)
    rate = dc.beta * (1.0 - dc.w_frac)
    logf = _log_integrand(p, lb, a, ctl)

    grid = np.geomspace(1e-10, 1e10, 801) * lb.gamma_bar
    lg = logf(grid)
    i_peak = int(np.argmax(lg))
    peak = lg[i_peak]
    g_peak = grid[i_peak]
    # first grid point past the peak after which the integrand stays < 1e-16 of it
    below = lg < peak - 37.0
    after = np.nonzero(~below[i_peak:])[0]
    i_cut = min(i_peak + after[-1] + 1, len(grid) - 1)
    g_cut = grid[i_cut]
    # rough magnitude for the absolute tolerance
    trap = np.trapezoid(np.exp(lg - peak) * grid, np.log(grid)) * math.exp(peak)
    epsabs = min(1e-12, 1e-14 * trap)
    limit = max(50, ctl.quad_nodes)

    def smooth(g):  # integrand / g^(m_x - 1)
        return math.exp(logf(g) - (p.m_x - 1.0) * math.log(g)) if g > 0 else _at_zero(p, dc)

    def body(g):
        return math.exp(logf(g))

    def tail(u):
        g = g_cut - math.log(u) / rate
        return math.exp(logf(g)) / (rate * u)

    if p.m_x > 1.0:
        g1 = min(1.0, g_peak, g_cut)
    else:
        # the peak sits at the singular endpoint; let QAWS cover the bulk near 0
        g1 = min(1.0 / dc.beta, g_cut)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            parts = [integrate.quad(smooth, 0.0, g1, weight="alg", wvar=(p.m_x - 1.0, 0.0),
                                    epsabs=epsabs, epsrel=1e-13, limit=limit)]
            if g_cut > g1:
                pts = [g for g in (g_peak, lb.gamma_bar, 1.0 / rate) if g1 < g < g_cut]
                parts.append(integrate.quad(body, g1, g_cut, points=pts or None,
                                            epsabs=epsabs, epsrel=1e-13, limit=limit))
            parts.append(integrate.quad(tail, 0.0, 1.0, epsabs=epsabs, epsrel=1e-13, limit=limit))
        except integrate.IntegrationWarning as exc:
            raise NonConvergenceError(f"ec quadrature did not converge: {exc}") from exc
    value = math.fsum(v for v, _ in parts)
    err = sum(e for _, e in parts)
    if err > max(1e-12, 1e-9 * value):
        raise NonConvergenceError(f"ec quadrature error estimate {err:.3g} too large")
    return value


def _at_zero(p, dc):
    # limit of f(g) / g^(m_x-1) at 0
    return math.exp(dc.prefactor_log - log_gamma(p.m_x) + p.m_x * math.log(dc.beta))


def ec_quadrature(p, lb, ds, ctl=DEFAULT_CONTROL):
    """Effective capacity from direct numerical integration of its definition."""
    a = as_delay(ds).a_constraint
    e = expectation_quadrature(p, lb, a, ctl)
    return -math.log2(e) / a


def _check_n(n):
    if n < MIN_MC_SAMPLES:
        raise ParameterDomainError(
            f"Monte-Carlo needs n >= {MIN_MC_SAMPLES}, got {n}", f"n >= {MIN_MC_SAMPLES}")


def ec_monte_carlo(p, lb, ds, seed, n, shards=1):
    """Monte-Carlo effective capacity; standard error by the delta method."""
    _check_n(n)
    a = as_delay(ds).a_constraint
    g = sample_snr(p, lb, seed, n, shards=shards)
    x = np.exp(-a * np.log1p(g))
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1)) / math.sqrt(n)
    return McEstimate(value=-math.log2(mean) / a, std_err=se / (a * mean * LN2),
                      n=int(n), seed=int(seed), shards=int(shards))


def ergodic_capacity_mc(p, lb, seed, n, shards=1):
    """Monte-Carlo mean of log2(1 + gamma)."""
    _check_n(n)
    g = sample_snr(p, lb, seed, n, shards=shards)
    c = np.log1p(g) / LN2
    return McEstimate(value=float(np.mean(c)), std_err=float(np.std(c, ddof=1)) / math.sqrt(n),
                      n=int(n), seed=int(seed), shards=int(shards))
