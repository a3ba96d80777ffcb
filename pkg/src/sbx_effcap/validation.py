"""Invariant suite behind ``sbx-effcap validate``.

Each check yields a :class:`CheckRow` holding the measured worst case and the
threshold it is compared against.  ``tolerance_scale`` multiplies every
numeric threshold; a tiny scale is the negative control that must fail.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkBudget, SbxParams, derived_constants, moment1
from .effcap import (
    _log_tail_factor,
    _log_term,
    effective_capacity_exact,
    low_snr_characterization,
)
from .oracle import (
    ec_monte_carlo,
    ec_quadrature,
    ergodic_capacity_mc,
    expectation_quadrature,
)
from .specfun import DEFAULT_CONTROL

__all__ = ["QUICK_GRID", "CheckRow", "GridPoint", "acceptance_grid", "brute_tails", "run_suite",
           "format_table", "MIN_VALIDATE_SAMPLES"]

MIN_VALIDATE_SAMPLES = 10**4
GRID_MX = (1.0, 2.0, 3.0)
GRID_MY = (2.0, 5.0, 10.0)
GRID_A = (0.5, 1.0, 5.0)
GRID_GBAR = (1.0, 10.0, 100.0)
QUICK_GRID = ((1.0, 3.0), (2.0, 10.0), (0.5, 5.0), (1.0, 100.0))
BOUND_DEPTHS = (1, 2, 5, 10, 20)
TAIL_EXTRA = 500


@dataclass(frozen=True)
class GridPoint:
    p: SbxParams
    gamma_bar: float
    a: float

    @property
    def lb(self):
        return LinkBudget(self.gamma_bar)

    def __str__(self):
        return (f"m_x={self.p.m_x:g} m_y={self.p.m_y:g} omega=({self.p.omega_x:g},"
                f"{self.p.omega_y:g}) gbar={self.gamma_bar:g} A={self.a:g}")


@dataclass(frozen=True)
class CheckRow:
    name: str
    measured: float
    threshold: float
    passed: bool
    gating: bool = True
    detail: str = ""


def acceptance_grid(mx=GRID_MX, my=GRID_MY, a_vals=GRID_A, gbar=GRID_GBAR, omega=2.0):
    """The 81-point grid (m_x x m_y x A x gamma_bar) with omega_x = omega_y = omega."""
    return [GridPoint(SbxParams(x, omega, y, omega), g, a)
            for x, y, a, g in itertools.product(mx, my, a_vals, gbar)]


def brute_tails(pt, depths=BOUND_DEPTHS, extra=TAIL_EXTRA, ctl=DEFAULT_CONTROL):
    """{D: sum of series terms D .. D+extra} for each D."""
    dc = derived_constants(pt.p, pt.lb, ctl)
    top = max(depths) + extra
    lt = np.array([_log_term(d, pt.p, dc, pt.a, ctl) for d in range(top + 1)])
    return {D: float(np.exp(np.logaddexp.reduce(lt[D:D + extra + 1]))) for D in depths}


def _tail_bounds(pt, depths, arg_name, ctl):
    dc = derived_constants(pt.p, pt.lb, ctl)
    arg = getattr(dc, arg_name)
    return {D: math.exp(_log_term(D, pt.p, dc, pt.a, ctl) + _log_tail_factor(D, pt.p, arg, ctl))
            for D in depths}


def _row(name, measured, threshold, scale, gating=True, detail="", le=True):
    thr = threshold * scale
    ok = measured <= thr if le else measured >= thr
    return CheckRow(name, float(measured), float(thr), bool(ok), gating, detail)


def check_normalization(scale, ctl):
    worst, where = 0.0, ""
    for mx, my, g in itertools.product((0.5, 2.0, 5.0), (0.5, 2.0, 10.0), (0.1, 10.0, 1000.0)):
        p = SbxParams(mx, 2.0, my, 2.0)
        err = abs(expectation_quadrature(p, LinkBudget(g), 0.0, ctl) - 1.0)
        if err > worst:
            worst, where = err, f"m_x={mx:g} m_y={my:g} gbar={g:g}"
    return _row("normalization |int f - 1|", worst, 1e-8, scale, detail=where)


def check_mean_identity(seed, scale, ctl):
    rng = np.random.default_rng(seed)
    worst_m, worst_e = 0.0, 0.0
    for _ in range(20):
        mx, my = rng.uniform(0.5, 10.0, 2)
        ox, oy = rng.uniform(0.1, 20.0, 2)
        g = 10.0 ** rng.uniform(-2, 4)
        p = SbxParams(mx, ox, my, oy)
        worst_m = max(worst_m, abs(moment1(p, LinkBudget(g), ctl) / g - 1.0))
        e1 = low_snr_characterization(p, 1.0, ctl).ebn0_min
        e5 = low_snr_characterization(p, 5.0, ctl).ebn0_min
        worst_e = max(worst_e, abs(e5 / e1 - 1.0))
    return [_row("mean identity |E[g]/gbar - 1|", worst_m, 1e-12, scale),
            _row("ebn0_min A-invariance", worst_e, 1e-12, scale)]


def run_suite(seed, n, grid=None, tolerance_scale=1.0, ctl=DEFAULT_CONTROL, shards=1):
    """Run every check and return the list of rows."""
    grid = acceptance_grid() if grid is None else grid
    s = tolerance_scale
    rows = [check_normalization(s, ctl)]
    rows += check_mean_identity(seed, s, ctl)

    exact, rel_q, z_mc = {}, [], []
    for pt in grid:
        ex = effective_capacity_exact(pt.p, pt.lb, pt.a, ctl).ec_bits
        q = ec_quadrature(pt.p, pt.lb, pt.a, ctl)
        mc = ec_monte_carlo(pt.p, pt.lb, pt.a, seed, n, shards)
        exact[pt] = ex
        rel_q.append((abs(q - ex) / abs(q), pt))
        z_mc.append((abs(q - mc.value) / mc.std_err, pt))
    wq, pq = max(rel_q, key=lambda t: t[0])
    wz, pz = max(z_mc, key=lambda t: t[0])
    rows.append(_row("oracle: |quad - exact|/quad", wq, 1e-6, s, detail=str(pq)))
    rows.append(_row("oracle: |quad - mc|/std_err", wz, 3.0, s, detail=str(pz)))

    cert_ratio, zb_viol, zb_checked = 0.0, 0, 0
    cert_where = ""
    for pt in grid:
        tails = brute_tails(pt, ctl=ctl)
        cert = _tail_bounds(pt, BOUND_DEPTHS, "w_frac", ctl)
        for D in BOUND_DEPTHS:
            r = tails[D] / cert[D]
            if r > cert_ratio:
                cert_ratio, cert_where = r, f"{pt} D={D}"
        if derived_constants(pt.p, pt.lb, ctl).z_arg < 1.0:
            zb = _tail_bounds(pt, BOUND_DEPTHS, "z_arg", ctl)
            for D in BOUND_DEPTHS:
                zb_checked += 1
                zb_viol += tails[D] > zb[D]
    rows.append(_row("bound soundness: max tail/certified bound", cert_ratio, 1.0, s,
                     detail=cert_where))
    rows.append(CheckRow("info: closed-form z-bound violations", zb_viol, 0.0,
                         zb_viol == 0, False, f"of {zb_checked} (point, D) pairs with z < 1"))

    mono_a = mono_g = 0
    by_key = {}
    for pt, v in exact.items():
        by_key.setdefault(("a", pt.p, pt.gamma_bar), []).append((pt.a, v))
        by_key.setdefault(("g", pt.p, pt.a), []).append((pt.gamma_bar, v))
    for (kind, *_), seq in by_key.items():
        vals = [v for _, v in sorted(seq)]
        steps = np.diff(vals)
        if kind == "a":
            mono_a += int(np.sum(steps >= 0))
        else:
            mono_g += int(np.sum(steps <= 0))
    rows.append(_row("monotone: EC strictly decreasing in A (violations)", mono_a, 0, 1.0))
    rows.append(_row("monotone: EC strictly increasing in gbar (violations)", mono_g, 0, 1.0))

    jensen = 0.0
    j_where = ""
    ergodic = {}
    for pt, v in exact.items():
        key = (pt.p, pt.gamma_bar)
        if key not in ergodic:
            ergodic[key] = ergodic_capacity_mc(pt.p, pt.lb, seed, n, shards)
        e = ergodic[key]
        excess = (v - e.value) / e.std_err
        if excess > jensen:
            jensen, j_where = excess, str(pt)
    rows.append(_row("Jensen: (EC - ergodic)/std_err", jensen, 3.0, s, detail=j_where))
    return rows


def format_table(rows):
    lines = [f"{'status':<6}  {'check':<52}  {'measured':>12}  {'threshold':>12}  detail"]
    for r in rows:
        status = ("PASS" if r.passed else "FAIL") if r.gating else "info"
        lines.append(f"{status:<6}  {r.name:<52}  {r.measured:>12.4g}  {r.threshold:>12.4g}  "
                     f"{r.detail}")
    return "\n".join(lines)
