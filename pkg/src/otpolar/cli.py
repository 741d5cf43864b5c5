"""Command-line front end: ``bounds``, ``simulate``, ``verify`` and ``polar-info``.

Exit codes: 0 success, 1 verification or feasibility failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

from . import bounds
from .gf2core import MAX_S
from .report import format_number, render_svg, write_csv

log = logging.getLogger("otpolar")

FIG1_METHODS = "polar:2,polar:3,polar:4,recursive:5,ska,upper"
SEED_ENV = "OT_POLAR_SEED"


class UsageError(Exception):
    pass


def _probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{v} is not in [0, 1]")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{v} must be positive")
    return v


def _open_out(path: str):
    if path == "-":
        return sys.stdout
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


# -- bounds ------------------------------------------------------------------


def cmd_bounds(args) -> int:
    if not args.q_start < args.q_end:
        raise UsageError("--q-start must be smaller than --q-end")
    try:
        methods = [bounds.MethodId.parse(m) for m in args.methods.split(",") if m.strip()]
        grid = bounds.Grid(args.q_start, args.q_end, args.q_step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not methods:
        raise UsageError("no methods given")
    fh = _open_out(args.out)
    curves = []
    for m in methods:
        log.info("sweeping %s", m.label)
        curves.append(bounds.sweep(m, grid))
    try:
        if args.format == "csv":
            write_csv(curves, fh)
        else:
            json.dump(
                {c.method.label: {"q": [float(format_number(q)) for q in c.q],
                                  "rate": [float(format_number(r)) for r in c.rate]} for c in curves},
                fh,
                indent=1,
            )
            fh.write("\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    if args.svg:
        with _open_out(args.svg) as svg:
            svg.write(render_svg(curves))
    if args.plot:
        from .report.figures import plot_curves

        try:
            plot_curves(curves, args.plot)
        except OSError as exc:
            raise UsageError(f"cannot write {args.plot}: {exc}") from None
    _flag_ska_ordering(curves)
    return 0


def _flag_ska_ordering(curves) -> None:
    by = {c.method.label: c for c in curves}
    ska, p2 = by.get("ska:erasure-side"), by.get("polar:2")
    if ska is None or p2 is None:
        return
    worse = ska.q[ska.rate < p2.rate - 1e-12]
    if worse.size:
        log.warning("interactive SKA curve below polar:2 at %d grid points (first q=%s)", worse.size, worse[0])


# -- verify --------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .verify import run_all

    if args.s_max > MAX_S or args.s_max < 1:
        raise UsageError(f"--s-max must be in [1, {MAX_S}]")
    try:
        qs = [float(v) for v in args.q_grid.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad --q-grid {args.q_grid!r}") from None
    if not qs or any(not 0.0 < q < 1.0 for q in qs):
        raise UsageError("--q-grid values must lie in (0, 1)")
    results = run_all(args.s_max, qs, args.tolerance)
    width = max(len(r.name) for r in results)
    print(f"{'check':<{width}}  {'max deviation':>14}  {'tolerance':>10}  result")
    for r in results:
        print(f"{r.name:<{width}}  {r.max_deviation:>14.3e}  {r.tolerance:>10.1e}  {'PASS' if r.passed else 'FAIL'}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: " + "; ".join(f"{r.name} ({r.max_deviation:.3e})" for r in failed))
        return 1
    print("all checks passed")
    return 0


# -- polar-info --------------------------------------------------------------


def cmd_polar_info(args) -> int:
    from .channels import polar_round_stats

    if not 1 <= args.s <= MAX_S:
        raise UsageError(f"--s must be in [1, {MAX_S}]")
    if not 0.0 < args.q < 1.0:
        raise UsageError("--q must lie in (0, 1)")
    n = 1 << args.s
    weight, total, live = 1.0, 0.0, True
    print(f"{'t':>3}  {'p_t':>14}  {'H(X|Y_t0)':>14}  {'H(X|Y_t1)':>14}  {'rate term':>14}  {'cumulative':>14}")
    for t in range(1, n):
        st = polar_round_stats(args.q, args.s, t)
        if st.p_t > 0.5 + bounds.HALF_TOL:
            live = False
        term = weight * st.p_t / n * max(st.gap, 0.0) if live else 0.0
        total += term
        weight *= max(1.0 - 2.0 * st.p_t, 0.0)
        print(f"{t:>3}  {st.p_t:>14.9f}  {st.h_good:>14.9f}  {st.h_bad:>14.9f}  {term:>14.9g}  {total:>14.9g}")
    return 0


# -- simulate ------------------------------------------------------------------


def cmd_simulate(args) -> int:
    from .protocol_sim import InfeasibleError, OtParams, simulate

    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    if not 0.0 < args.q < 1.0:
        raise UsageError("--q must lie in (0, 1)")
    if args.scheme == "polar" and not 1 <= args.s <= MAX_S:
        raise UsageError(f"--s must be in [1, {MAX_S}]")
    params = OtParams(
        n=args.n,
        q=args.q,
        scheme=args.scheme,
        s=args.s if args.scheme == "polar" else 1,
        delta=args.delta,
        delta_m=args.delta_m,
        delta_ir=args.delta_ir,
        delta_pa=args.delta_pa,
        seed=seed,
        trials=args.trials,
        decode_list_cap=args.list_cap,
    )
    fh = _open_out(args.out)
    try:
        report = simulate(params, log=log.info)
    except (InfeasibleError, ValueError) as exc:
        if fh is not sys.stdout:
            fh.close()
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


# -- wiring --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="otpolar", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log one line per phase to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="sweep OT-capacity bounds over a q grid")
    p.add_argument("--q-start", type=_probability, default=0.0)
    p.add_argument("--q-end", type=_probability, default=1.0)
    p.add_argument("--q-step", type=float, default=0.005)
    p.add_argument("--methods", default=FIG1_METHODS,
                   help="comma list: extension, recursive:T, polar:s, ska[:literal], hybrid:T:s, upper")
    p.add_argument("--out", default="-", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--svg", help="also write a standalone SVG chart here")
    p.add_argument("--plot", help="also render a matplotlib figure here (png, pdf, svg)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="closed forms, recursions and enumeration against each other")
    p.add_argument("--s-max", type=int, default=MAX_S)
    p.add_argument("--q-grid", default="0.01,0.05,0.1,0.2,0.3,0.4,0.49")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo runs of the OT protocol")
    p.add_argument("--scheme", choices=("bsec", "polar"), default="bsec")
    p.add_argument("--q", type=float, default=0.1)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--n", type=_positive_int, default=2000, help="number of blocks")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--delta-m", type=float, help="margin for m (default --delta)")
    p.add_argument("--delta-ir", type=float, help="reconciliation margin (default --delta)")
    p.add_argument("--delta-pa", type=float, help="privacy-amplification margin (default --delta)")
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, help=f"default: ${SEED_ENV} or 0")
    p.add_argument("--list-cap", type=_positive_int, default=1 << 16)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("polar-info", help="per-round quantities of the polarization emulation")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--s", type=int, default=2)
    p.set_defaults(func=cmd_polar_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
