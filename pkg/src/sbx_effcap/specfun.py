"""Special functions needed by the SBX effective-capacity formulas.

Everything here works on real arguments in the parameter ranges the channel
model produces.  Series are summed with a running log-scale so intermediate
terms may exceed the double range without overflowing; each routine has a
``log_*`` twin returning the natural log of the (positive) result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, roots_legendre, zeta

from .errors import DomainError, NonConvergenceError

__all__ = [
    "EvalControl",
    "DEFAULT_CONTROL",
    "log_gamma",
    "pochhammer",
    "kummer_1f1",
    "log_kummer_1f1",
    "log_kummer_1f1_array",
    "tricomi_u",
    "log_tricomi_u",
    "gauss_2f1",
    "log_gauss_2f1",
]

_BIG = 1e300
_INT_TOL = 1e-12
_EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class EvalControl:
    """Accuracy and budget knobs for series and quadrature evaluation.

    ``quad_nodes`` is the starting quadrature resolution; it is doubled on
    refinement up to ``max_quad_nodes``.
    """

    rel_tol: float = 1e-12
    max_terms: int = 10_000
    quad_nodes: int = 512
    max_quad_nodes: int = 4096

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.quad_nodes < 16:
            raise DomainError(f"quad_nodes must be >= 16, got {self.quad_nodes}")
        if self.max_quad_nodes < self.quad_nodes:
            raise DomainError("max_quad_nodes must be >= quad_nodes")


DEFAULT_CONTROL = EvalControl()


def _nonpositive_int(x):
    """Return the integer value if ``x`` is a nonpositive integer (within 1e-12), else None."""
    r = round(x)
    if r <= 0 and abs(x - r) <= _INT_TOL:
        return int(r)
    return None


# ---------------------------------------------------------------------------
# Gamma family
# ---------------------------------------------------------------------------

# ln Gamma(1+e) = -gamma_E e + sum_{k>=2} (-1)^k zeta(k) e^k / k, |e| < 1
_LGAMMA1P_COEF = np.array(
    [0.0, -_EULER_GAMMA] + [(-1) ** k * float(zeta(k)) / k for k in range(2, 48)]
)


def _lgamma1p(eps):
    acc = 0.0
    for c in _LGAMMA1P_COEF[:0:-1]:
        acc = (acc + c) * eps
    return acc


def log_gamma(x):
    """Natural log of the gamma function for ``x > 0``.

    ``math.lgamma`` loses relative accuracy next to the zeros at 1 and 2, so
    those neighbourhoods use the Taylor series of ln Gamma(1 + e).
    """
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    if abs(x - 1.0) < 0.25:
        return _lgamma1p(x - 1.0)
    if abs(x - 2.0) < 0.25:
        e = x - 2.0
        return math.log1p(e) + _lgamma1p(e)
    return math.lgamma(x)


def pochhammer(a, d):
    """Rising factorial (a)_d = a (a+1) ... (a+d-1); 1 for d = 0, inf past the double range."""
    d = int(d)
    if d < 0:
        raise DomainError(f"pochhammer requires d >= 0, got {d}")
    out = 1.0
    for k in range(d):
        out *= a + k
    return out


# ---------------------------------------------------------------------------
# Hypergeometric series
# ---------------------------------------------------------------------------

def _hyp_series(ratio, limit, ctl, what):
    """Sum 1 + t1 + t2 + ... where t_{k+1} = t_k * ratio(k).

    ``limit`` is |lim ratio(k)| (0 for 1F1, |w| for 2F1); it is used for the
    geometric tail estimate.  Returns ``(mantissa, log_scale)`` with the sum
    equal to ``mantissa * exp(log_scale)``.
    """
    total = 1.0
    term = 1.0
    log_scale = 0.0
    for k in range(ctl.max_terms):
        r = ratio(k)
        term *= r
        total += term
        if term == 0.0:
            return total, log_scale
        if abs(total) > _BIG or abs(term) > _BIG:
            s = max(abs(total), abs(term))
            total /= s
            term /= s
            log_scale += math.log(s)
        q = max(abs(r), limit)
        if q < 1.0:
            tail = abs(term) * q / (1.0 - q)
            if tail <= ctl.rel_tol * abs(total) and abs(ratio(k + 1)) <= max(abs(r), limit) + 1e-15:
                return total, log_scale
    raise NonConvergenceError(f"{what}: series not converged after {ctl.max_terms} terms")


def _check_denominator(b, name):
    if _nonpositive_int(b) is not None:
        raise DomainError(f"{name} must not be a nonpositive integer, got {b}")


def _log_1f1_parts(a, b, x, ctl):
    """(sign, log|1F1(a;b;x)|) choosing the cancellation-free side of Kummer's relation."""
    _check_denominator(b, "b")
    if x == 0.0:
        return 1.0, 0.0
    n = _nonpositive_int(a)
    if n is not None:
        a = float(n)
    elif x > 1000.0 and a > 0.0 and b > 0.0:
        return 1.0, float(log_kummer_1f1_array(a, b, np.array([x]), ctl)[0])
    elif x < 0.0 and b - a > 0.0 and b > 0.0:
        # 1F1(a;b;x) = e^x 1F1(b-a;b;-x): positive terms on the right
        sgn, lg = _log_1f1_parts(b - a, b, -x, ctl)
        return sgn, lg + x

    def ratio(k):
        return (a + k) * x / ((b + k) * (k + 1.0))

    m, s = _hyp_series(ratio, 0.0, ctl, "kummer_1f1")
    if m == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, m), s + math.log(abs(m))


def kummer_1f1(a, b, x, ctl=DEFAULT_CONTROL):
    """Kummer's confluent hypergeometric function 1F1(a; b; x).

    Negative ``x`` is mapped through the Kummer transformation whenever that
    gives a series of positive terms.  Results above the double range come
    back as ``inf``; use :func:`log_kummer_1f1` there.
    """
    sgn, lg = _log_1f1_parts(float(a), float(b), float(x), ctl)
    if sgn == 0.0:
        return 0.0
    return sgn * math.exp(lg) if lg < 709.78 else sgn * math.inf


def log_kummer_1f1(a, b, x, ctl=DEFAULT_CONTROL):
    """ln 1F1(a; b; x); raises if the function value is not positive."""
    sgn, lg = _log_1f1_parts(float(a), float(b), float(x), ctl)
    if sgn <= 0.0:
        raise DomainError(f"1F1({a}; {b}; {x}) is not positive; log undefined")
    return lg


def _log_1f1_asymptotic(a, b, x):
    """Large-x expansion  1F1 ~ Gamma(b)/Gamma(a) e^x x^(a-b) sum_k (b-a)_k (1-a)_k / (k! x^k)."""
    s = np.ones_like(x)
    t = np.ones_like(x)
    for k in range(500):
        t = t * (b - a + k) * (1.0 - a + k) / ((k + 1.0) * x)
        s = s + t
        if np.all(np.abs(t) <= 1e-17 * np.abs(s)):
            break
    else:
        raise NonConvergenceError("1F1 asymptotic expansion did not settle")
    return x + (a - b) * np.log(x) + gammaln(b) - gammaln(a) + np.log(s)


def log_kummer_1f1_array(a, b, x, ctl=DEFAULT_CONTROL):
    """Vectorized ln 1F1(a; b; x) for a > 0, b > 0 and x >= 0.

    All series terms are positive, so the sum is a log-sum-exp over the
    term logs.  Far beyond the term peak the asymptotic expansion is used.
    """
    x = np.asarray(x, dtype=float)
    if not (a > 0 and b > 0):
        raise DomainError("log_kummer_1f1_array requires a > 0 and b > 0")
    if np.any(x < 0):
        raise DomainError("log_kummer_1f1_array requires x >= 0")
    flat = x.ravel()
    out = np.zeros_like(flat)
    x_asym = max(1000.0, min(8.0 * (abs(b - a) + 1.0) * (abs(1.0 - a) + 1.0),
                              0.5 * ctl.max_terms))
    big = flat > x_asym
    if np.any(big):
        out[big] = _log_1f1_asymptotic(a, b, flat[big])
    pos = (flat > 0) & ~big
    if np.any(pos):
        xs = flat[pos]
        xmax = float(xs.max())
        # terms peak near k ~ x; go well past the peak
        kmax = int(xmax + 12.0 * math.sqrt(xmax) + 40.0 + 2.0 * abs(a - b))
        if kmax > ctl.max_terms:
            raise NonConvergenceError(
                f"log_kummer_1f1_array: needs {kmax} terms, budget {ctl.max_terms}")
        k = np.arange(kmax + 1, dtype=float)
        coef = gammaln(a + k) - gammaln(a) - gammaln(b + k) + gammaln(b) - gammaln(k + 1.0)
        logt = coef[None, :] + k[None, :] * np.log(xs)[:, None]
        peak = logt.max(axis=1)
        tot = np.log(np.exp(logt - peak[:, None]).sum(axis=1)) + peak
        if np.any(logt[:, -1] - tot > math.log(ctl.rel_tol) - 5.0):
            raise NonConvergenceError("log_kummer_1f1_array: truncated tail too large")
        out[pos] = tot
    return out.reshape(x.shape)


def _log_2f1_parts(a, b, c, w, ctl):
    if not abs(w) < 1.0:
        raise DomainError(f"gauss_2f1 requires |w| < 1, got {w}")
    _check_denominator(c, "c")
    na, nb = _nonpositive_int(a), _nonpositive_int(b)
    if na is not None:
        a = float(na)
    if nb is not None:
        b = float(nb)
    # canonical order keeps the result symmetric in (a, b) bit-for-bit
    a, b = (a, b) if a <= b else (b, a)
    if w == 0.0:
        return 1.0, 0.0

    def ratio(k):
        return (a + k) * (b + k) * w / ((c + k) * (k + 1.0))

    m, s = _hyp_series(ratio, abs(w), ctl, "gauss_2f1")
    if m == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, m), s + math.log(abs(m))


def gauss_2f1(a, b, c, w, ctl=DEFAULT_CONTROL):
    """Gauss hypergeometric function 2F1(a, b; c; w) for |w| < 1 by direct series.

    Terminates exactly when ``a`` or ``b`` is a nonpositive integer.
    """
    sgn, lg = _log_2f1_parts(float(a), float(b), float(c), float(w), ctl)
    if sgn == 0.0:
        return 0.0
    return sgn * math.exp(lg) if lg < 709.78 else sgn * math.inf


def log_gauss_2f1(a, b, c, w, ctl=DEFAULT_CONTROL):
    """ln 2F1(a, b; c; w); raises if the value is not positive."""
    sgn, lg = _log_2f1_parts(float(a), float(b), float(c), float(w), ctl)
    if sgn <= 0.0:
        raise DomainError(f"2F1({a}, {b}; {c}; {w}) is not positive; log undefined")
    return lg


# ---------------------------------------------------------------------------
# Tricomi U via its integral representation
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _gl_rule(n):
    x, w = roots_legendre(n)
    return x, w


def _softplus(u):
    return u + math.log1p(math.exp(-u)) if u > 0 else math.log1p(math.exp(u))


def _log_u_integral(a, z, c, ctl):
    """ln of  int_0^inf e^{-z t} t^{a-1} (1+t)^c dt  (a > 0, z > 0).

    With t = e^u the log-integrand  phi(u) = a u - z e^u + c ln(1 + e^u)
    has a single maximum.  The u-line is cut into Gauss-Legendre panels
    whose widths start at the local decay scale next to the mode and double
    outwards until phi has fallen by 50 below its peak.
    """

    def phi(u):
        eu = math.exp(u) if u < 700 else math.inf
        return a * u - z * eu + c * _softplus(u)

    def dphi(u):
        eu = math.exp(u) if u < 700 else math.inf
        sig = 1.0 / (1.0 + math.exp(-u)) if u > -700 else 0.0
        return a - z * eu + c * sig

    # bracket the unique stationary point
    u0 = math.log(a / z)
    lo, hi = u0 - 1.0, u0 + 1.0
    while dphi(lo) <= 0.0:
        lo -= 2.0 * (u0 - lo) + 1.0
    while dphi(hi) >= 0.0:
        hi += 2.0 * (hi - u0) + 1.0
    um = brentq(dphi, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    pm = phi(um)

    def edge(direction):
        # distance at which phi drops by 1, capped at 1 (scale of e^u features)
        step = 1.0
        target = pm - 1.0
        if phi(um + direction * step) <= target:
            h = brentq(lambda s: phi(um + direction * s) - target, 0.0, step, xtol=1e-10)
            step = max(h, 1e-8)
        bounds = [um]
        width = step
        for _ in range(200):
            nxt = bounds[-1] + direction * width
            bounds.append(nxt)
            if phi(nxt) < pm - 50.0:
                return bounds
            width *= 2.0
        raise NonConvergenceError("tricomi_u: integrand tail does not decay")

    left = edge(-1.0)[::-1]
    right = edge(1.0)
    breaks = np.array(left + right[1:])
    lo_b, hi_b = breaks[:-1], breaks[1:]
    half = 0.5 * (hi_b - lo_b)
    mid = 0.5 * (hi_b + lo_b)

    def panel_sum(q):
        x, w = _gl_rule(q)
        u = mid[:, None] + half[:, None] * x[None, :]
        eu = np.exp(np.minimum(u, 700.0))
        ph = a * u - z * eu + c * np.logaddexp(0.0, u)
        return float(np.sum(half[:, None] * w[None, :] * np.exp(ph - pm)))

    q = max(8, ctl.quad_nodes // 16)
    qmax = max(q, ctl.max_quad_nodes // 16)
    prev = panel_sum(q)
    while True:
        q2 = 2 * q
        cur = panel_sum(q2)
        if abs(cur - prev) <= ctl.rel_tol * abs(cur):
            return pm + math.log(cur)
        if q2 >= qmax:
            raise NonConvergenceError(
                f"tricomi_u: quadrature not converged (a={a}, z={z}, c={c})")
        prev, q = cur, q2


def log_tricomi_u(a, b, z, ctl=DEFAULT_CONTROL):
    """ln U(a; b; z) for a > 0, z > 0 from the integral representation

        U(a; b; z) = 1/Gamma(a) * int_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt.
    """
    a, b, z = float(a), float(b), float(z)
    if not a > 0.0:
        raise DomainError(f"tricomi_u requires a > 0, got {a}")
    if not z > 0.0:
        raise DomainError(f"tricomi_u requires z > 0, got {z}")
    return _log_u_integral(a, z, b - a - 1.0, ctl) - log_gamma(a)


def tricomi_u(a, b, z, ctl=DEFAULT_CONTROL):
    """Tricomi's confluent hypergeometric function U(a; b; z), a > 0, z > 0."""
    lg = log_tricomi_u(a, b, z, ctl)
    return math.exp(lg) if lg < 709.78 else math.inf
