"""Command-line front end: ``sbx-effcap {eval,sweep,figure,validate}``.

Exit codes: 0 success, 1 failed validation check, 2 invalid input,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import os
import sys

from .channel import LinkBudget, SbxParams, validate
from .effcap import DelaySpec, effective_capacity_exact, effective_capacity_high_snr
from .errors import DegenerateError, DomainError, NonConvergenceError, ParameterDomainError
from .figures import FIGURES, figure_claims, run_figure
from .oracle import ec_monte_carlo, ec_quadrature
from .specfun import EvalControl
from .sweep import SweepConfig, format_float, parse_config_text, write_csv
from .validation import MIN_VALIDATE_SAMPLES, QUICK_GRID, acceptance_grid, format_table, run_suite

EXIT_OK, EXIT_CHECK_FAILED, EXIT_DOMAIN, EXIT_NONCONVERGENCE = 0, 1, 2, 3
DEFAULT_SEED = 2024
METHODS = ("exact", "quadrature", "high-snr", "mc")


def default_seed():
    raw = os.environ.get("SBX_EC_SEED")
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ParameterDomainError(f"SBX_EC_SEED must be an integer, got {raw!r}",
                                   "SBX_EC_SEED integer") from None


def _delay(args):
    if args.A is not None:
        return DelaySpec.from_a(args.A)
    if args.theta is None:
        raise ParameterDomainError("give --A or --theta", "A or theta")
    return DelaySpec.from_theta(args.theta, args.T, args.B)


def cmd_eval(args):
    p = validate(SbxParams(args.mx, args.omega_x, args.my, args.omega_y))
    lb = LinkBudget.from_db(args.snr_db)
    ds = _delay(args)
    ctl = EvalControl(rel_tol=args.tol)
    seed = default_seed() if args.seed is None else args.seed
    methods = args.method or ["exact", "quadrature"]
    lines = []
    for m in methods:
        if m == "exact":
            r = effective_capacity_exact(p, lb, ds, ctl)
            lines.append((m, r.ec_bits, str(r.terms_used), f"{r.trunc_bound:.3e}", "-"))
        elif m == "quadrature":
            lines.append((m, ec_quadrature(p, lb, ds, ctl), "-", "-", "-"))
        elif m == "high-snr":
            lines.append((m, effective_capacity_high_snr(p, lb, ds, ctl), "-", "-", "-"))
        else:
            est = ec_monte_carlo(p, lb, ds, seed, args.mc_samples, args.shards)
            lines.append((m, est.value, "-", "-", f"{est.std_err:.3e}"))
    print("method      ec_bits_per_s_per_hz  terms_used  trunc_bound  std_err")
    for m, v, t, b, se in lines:
        print(f"{m:<11} {format_float(v):<21} {t:<11} {b:<12} {se}")
    return EXIT_OK


_SWEEP_FLAGS = (
    ("--axis", "axis", str), ("--from", "start", float), ("--to", "stop", float),
    ("--step", "step", float), ("--mx", "m_x", float), ("--omega-x", "omega_x", float),
    ("--my", "m_y", float), ("--omega-y", "omega_y", float), ("--snr-db", "snr_db", float),
    ("--A", "a_constraint", float), ("--theta", "theta", float), ("--tb", "tb", float),
    ("--seed", "seed", int), ("--n-samples", "n_samples", int), ("--shards", "shards", int),
    ("--tol", "rel_tol", float), ("--out", "out", str),
)


def cmd_sweep(args):
    overrides = {dest: getattr(args, dest) for _, dest, _ in _SWEEP_FLAGS}
    if args.outputs is not None:
        overrides["outputs"] = tuple(o.strip() for o in args.outputs.split(",") if o.strip())
    if args.config:
        with open(args.config) as fh:
            kw = parse_config_text(fh.read())
    else:
        kw = {}
    kw.update({k: v for k, v in overrides.items() if v is not None})
    kw.setdefault("seed", default_seed())
    missing = [k for k in ("axis", "start", "stop", "step") if k not in kw]
    if missing:
        raise ParameterDomainError(f"sweep config is missing {', '.join(missing)}",
                                   "complete sweep range")
    cfg = SweepConfig(**kw)
    if not cfg.out:
        raise ParameterDomainError("sweep needs an output path (--out or out=)", "out path")
    rows = write_csv(cfg, cfg.out, workers=args.workers)
    print(f"wrote {len(rows)} rows to {cfg.out}")
    return EXIT_OK


def cmd_figure(args):
    seed = default_seed() if args.seed is None else args.seed
    out = args.out or f"fig{args.id}"
    paths = run_figure(args.id, out, tb=args.tb, seed=seed, n_samples=args.mc_samples,
                       workers=args.workers, emit_plot=args.emit_plot)
    print("\n".join(figure_claims(args.id, args.tb)))
    print(f"wrote {len(paths)} files to {out}")
    return EXIT_OK


def cmd_validate(args):
    if args.n < MIN_VALIDATE_SAMPLES:
        raise ParameterDomainError(
            f"validate needs n >= {MIN_VALIDATE_SAMPLES}, got {args.n}", "n >= 1e4")
    seed = default_seed() if args.seed is None else args.seed
    scale = 1e-30 if args.break_tolerance else 1.0
    grid = acceptance_grid(*QUICK_GRID) if args.quick else None
    rows = run_suite(seed, args.n, grid=grid, tolerance_scale=scale, shards=args.shards)
    print(format_table(rows))
    failed = [r for r in rows if r.gating and not r.passed]
    for r in failed:
        print(f"FAILED {r.name}: measured {r.measured:.6g} vs threshold {r.threshold:.6g}",
              file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _positive_int(s):
    v = int(float(s))
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {s}")
    return v


def build_parser():
    ap = argparse.ArgumentParser(prog="sbx-effcap",
                                 description="Effective capacity of the SBX fading channel.")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one parameter point")
    for flag in ("--mx", "--omega-x", "--my", "--omega-y", "--snr-db"):
        ev.add_argument(flag, type=float, required=True)
    ev.add_argument("--A", type=float, help="delay constraint A = theta T B / ln 2")
    ev.add_argument("--theta", type=float)
    ev.add_argument("--T", type=float, default=1.0)
    ev.add_argument("--B", type=float, default=1.0)
    ev.add_argument("--tol", type=float, default=1e-12)
    ev.add_argument("--seed", type=int)
    ev.add_argument("--mc-samples", type=_positive_int, default=10**6)
    ev.add_argument("--shards", type=_positive_int, default=1)
    ev.add_argument("--method", action="append", choices=METHODS,
                    help="repeatable; default exact and quadrature")
    ev.set_defaults(func=cmd_eval)

    sw = sub.add_parser("sweep", help="write a parameter sweep as CSV")
    sw.add_argument("--config", help="flat key=value file; flags override it")
    for flag, dest, typ in _SWEEP_FLAGS:
        sw.add_argument(flag, dest=dest, type=typ)
    sw.add_argument("--outputs", help="comma list of exact,high_snr,low_snr,mc,quadrature")
    sw.add_argument("--workers", type=_positive_int, default=1)
    sw.set_defaults(func=cmd_sweep)

    fg = sub.add_parser("figure", help="reproduce one figure's curves and claims")
    fg.add_argument("id", type=int, choices=FIGURES)
    fg.add_argument("--out", help="output directory (default figN)")
    fg.add_argument("--tb", type=float, default=1.0, help="T*B product for figure 3")
    fg.add_argument("--seed", type=int)
    fg.add_argument("--mc-samples", type=_positive_int, default=10**5)
    fg.add_argument("--workers", type=_positive_int, default=1)
    fg.add_argument("--emit-plot", action="store_true", help="also write a matplotlib script")
    fg.set_defaults(func=cmd_figure)

    va = sub.add_parser("validate", help="run the invariant suite")
    va.add_argument("--seed", type=int)
    va.add_argument("--n", type=lambda s: int(float(s)), default=10**6)
    va.add_argument("--shards", type=_positive_int, default=1)
    va.add_argument("--quick", action="store_true", help="16-point grid instead of 81")
    va.add_argument("--break-tolerance", action="store_true", help=argparse.SUPPRESS)
    va.set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterDomainError as exc:
        rule = f" [violated: {exc.invariant}]" if exc.invariant else ""
        print(f"error: {exc}{rule}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DomainError, DegenerateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
