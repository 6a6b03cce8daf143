"""Command-line front end.

Subcommands ``squarepot`` and ``splinepot`` compute a classified resonance
set for a potential file, ``scan`` runs a bound/antibound q-scan, and
``rho`` tabulates the reflection coefficient of an absorbing layer.

Exit status is 0 on success, 2 for invalid input and 3 when a computation
fails; diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import absorber, io as rio, spectral, transfer
from .errors import ComputationError, InputError
from .resonance import DEFAULT_K0, q_scan

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3

DEFAULT_WINDOW = (-10.0, 10.0, -5.0, 5.0)


def _numbers(text: str, n: int, what: str):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise InputError(f"{what}: expected {n} numbers, got {len(vals)}")
    return vals


def _window(text: str | None):
    if text is None:
        return None
    a, b, c, d = _numbers(text, 4, "--window")
    if not (a < b and c < d):
        raise InputError("--window needs re_lo < re_hi and im_lo < im_hi")
    return (a, b, c, d)


def _emit(text_by_format: dict, out: str | None, fmt: str):
    """Write both formats next to ``out`` or print the chosen one."""
    if out is None:
        sys.stdout.write(text_by_format[fmt])
        return
    base = Path(out)
    stem = base.with_suffix("") if base.suffix in (".json", ".csv") else base
    for ext, text in text_by_format.items():
        rio.atomic_write(stem.with_suffix(f".{ext}"), text)


def _resonances(args, kind: str):
    cfg = rio.load_config(args.potential)
    found = cfg.get("kind", "").lower()
    if found != kind:
        raise InputError(f"{args.potential}: expected kind={kind}, found kind={found!r}")
    p = rio.potential_from_config(cfg)
    window = _window(args.window)
    if args.engine == "transfer":
        if window is None:
            raise InputError("the transfer engine needs --window")
        rs = transfer.secular_resonance_set(p, window)
    else:
        mesh = spectral.default_mesh(p, args.order)
        rs = spectral.filtered_eigenvalues(p, mesh, match_tol=args.match_tol,
                                           window=window or DEFAULT_WINDOW)
    _emit({"json": rio.resonance_set_to_json(rs), "csv": rio.resonance_set_to_csv(rs)},
          args.out, args.format)


def cmd_squarepot(args):
    _resonances(args, "squarepot")


def cmd_splinepot(args):
    _resonances(args, "splinepot")


def cmd_scan(args):
    p = rio.load_potential(args.potential)
    if args.q_steps < 2:
        raise InputError("--q-steps must be at least 2")
    if not 0 < args.q_min < args.q_max:
        raise InputError("need 0 < --q-min < --q-max")
    barrier = None if args.barrier is None else _numbers(args.barrier, 3, "--barrier")
    grid = np.linspace(args.q_min, args.q_max, args.q_steps)
    scan = q_scan(p, barrier, grid, k0=args.k0, engine=args.engine, order=args.order)
    table = rio.scan_to_csv(scan)
    summary = rio.dumps_json(rio.scan_summary(scan))
    if args.out is None:
        sys.stdout.write(summary if args.format == "json" else table)
        return
    out = Path(args.out)
    rio.atomic_write(out, table)
    rio.atomic_write(out.with_name(out.stem + ".summary.json"), summary)


def _absorber_spec(args) -> absorber.AbsorberSpec:
    cfg = rio.load_config(args.absorber) if args.absorber else {}
    try:
        sigma = float(cfg.get("absorber.sigma", absorber.DEFAULT_SIGMA))
        width = float(cfg.get("absorber.width", absorber.DEFAULT_WIDTH))
    except ValueError as exc:
        raise InputError(f"absorber config: {exc}") from None
    profile = cfg.get("absorber.profile", "quadratic")
    if args.sigma is not None:
        sigma = args.sigma
    if args.width is not None:
        width = args.width
    if not width > 0:
        raise InputError("absorber width must be positive")
    return absorber.AbsorberSpec(0.0, width, sigma, profile)


def cmd_rho(args):
    spec = _absorber_spec(args)
    if not args.lam:
        raise InputError("give at least one --lambda re,im")
    lams = [complex(*_numbers(t, 2, "--lambda")) for t in args.lam]
    if any(lam == 0 for lam in lams):
        raise InputError("lambda must be nonzero")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re_lambda", "im_lambda", "re_rho", "im_rho", "abs_rho",
                "re_lambda_hat", "im_lambda_hat"])
    for lam in lams:
        r = absorber.reflection(spec, lam)
        w.writerow([rio.fmt(v) for v in (lam.real, lam.imag, r.rho.real, r.rho.imag,
                                          abs(r.rho), r.lambda_hat.real, r.lambda_hat.imag)])
    if args.out is None:
        sys.stdout.write(buf.getvalue())
    else:
        rio.atomic_write(args.out, buf.getvalue())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resonances1d",
        description="Resonances, bound and antibound states of 1D Schroedinger operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, engine_default):
        sp.add_argument("--potential", required=True, help="potential description file")
        sp.add_argument("--out", help="output path (both .json and .csv are written)")
        sp.add_argument("--format", choices=("csv", "json"), default="json",
                        help="stdout format when --out is absent")
        sp.add_argument("--engine", choices=("transfer", "spectral"), default=engine_default)
        sp.add_argument("--order", type=int, default=spectral.DEFAULT_ORDER,
                        help="collocation order per block")

    for name, func in (("squarepot", cmd_squarepot), ("splinepot", cmd_splinepot)):
        sp = sub.add_parser(name, help=f"resonance set of a {name} potential")
        common(sp, "spectral")
        sp.add_argument("--window", help="re_lo,re_hi,im_lo,im_hi")
        sp.add_argument("--match-tol", type=float, default=1e-6,
                        help="relative tolerance of the refinement filter")
        sp.set_defaults(func=func)

    sp = sub.add_parser("scan", help="bound/antibound symmetry scan over q")
    common(sp, "transfer")
    sp.set_defaults(format="csv")
    sp.add_argument("--barrier", help="A,B,V1")
    sp.add_argument("--q-min", type=float, default=1.0)
    sp.add_argument("--q-max", type=float, default=10.0)
    sp.add_argument("--q-steps", type=int, default=10)
    sp.add_argument("--k0", type=float, default=DEFAULT_K0)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("rho", help="reflection coefficient of an absorbing layer")
    sp.add_argument("--lambda", dest="lam", action="append", metavar="RE,IM")
    sp.add_argument("--absorber", help="config file with absorber.* keys")
    sp.add_argument("--sigma", type=float, help="absorber strength")
    sp.add_argument("--width", type=float, help="absorber width M - L")
    sp.add_argument("--out", help="write the CSV here instead of stdout")
    sp.set_defaults(func=cmd_rho)
    return parser


_VALUE_FLAGS = ("--window", "--lambda", "--barrier")


def _attach_values(argv):
    """Glue ``--window -1,...`` into ``--window=-1,...`` so argparse accepts it."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ComputationError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
