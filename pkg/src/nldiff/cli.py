"""Command-line front end.

Subcommands: hamiltonian, legendre, rate, solve, study, selftest.
Exit codes: 0 success, 1 validation error (message names the field),
2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import kernels as K
from .errors import NldiffError
from .hamiltonian import ham_eval
from .legendre import conjugate, law_prediction
from .ratefn import bound, rate, rate_capped
from .selftest import SUITES, run as run_selftest
from .solver import (Field, SolveConfig, default_dt, integrate, make_grid,
                     write_field_csv)
from .study import StudyConfig, run_study


def parse_kernel(spec: str) -> K.Kernel:
    """Parse 'family[:key=value,...]', e.g. uniform:eta=1 or stretched:alpha=2."""
    name, _, rest = spec.partition(":")
    kv = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"kernel: malformed parameter {item!r}")
        kv[key] = val
    try:
        if name == "uniform":
            return K.uniform_compact(float(kv.pop("eta", 1.0)))
        if name == "poly":
            return K.polynomial_compact()
        if name == "gaussian":
            return K.gaussian()
        if name == "stretched":
            return K.stretched_exp(float(kv.pop("alpha")))
        if name == "critical":
            return K.critical_exp()
        if name == "singular":
            return K.singular_compact(float(kv.pop("alpha")))
        if name == "custom":
            return K.custom_from_csv(kv.pop("path"))
    except KeyError as exc:
        raise ValueError(f"kernel: missing parameter {exc.args[0]}") from None
    raise ValueError(f"kernel: unknown family {name!r}")


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, val = line.partition("=")
            if not eq:
                raise ValueError(f"config: malformed line {line!r}")
            out[key.strip()] = val.strip()
    return out


# ---------------------------------------------------------------------------

def cmd_hamiltonian(args) -> int:
    k = parse_kernel(args.kernel)
    ps = _floats(args.p)
    print("p,H,dH,d2H,method,quad_error")
    for p in ps:
        ev = ham_eval(k, p, force_quadrature=args.quadrature)
        print(f"{p!r},{ev.value!r},{ev.deriv!r},{ev.second!r},"
              f"{ev.method},{ev.quad_error_estimate!r}")
    return 0


def cmd_legendre(args) -> int:
    k = parse_kernel(args.kernel)
    qs = _floats(args.q)
    header = "q,L,p0,iterations,residual"
    if args.law:
        header += ",law_ratio"
    print(header)
    for q in qs:
        pt = conjugate(k, q)
        row = f"{q!r},{pt.value!r},{pt.p0!r},{pt.iterations},{pt.residual!r}"
        if args.law:
            if abs(q) <= math.e:
                raise ValueError("q: asymptotic law columns need |q| > e")
            row += f",{pt.value / law_prediction(k, abs(q))!r}"
        print(row)
    return 0


def cmd_rate(args) -> int:
    k = parse_kernel(args.kernel)
    if args.R is not None:
        if args.theta is None:
            raise ValueError("theta: required together with --R")
        pred = bound(k, args.R, args.theta, args.t)
        print(json.dumps({
            "R": pred.R, "theta": pred.theta, "t": pred.t_phys,
            "exponent": pred.exponent, "bound": pred.bound,
            "asymptotic_exponent": pred.asymptotic_exponent,
        }, indent=2, sort_keys=True))
        return 0
    if args.x is None:
        raise ValueError("x: required unless --R is given")
    if args.cap is not None:
        print(repr(rate_capped(k, args.x, args.t, args.cap)))
    else:
        print(repr(rate(k, args.x, args.t)))
    return 0


def cmd_solve(args) -> int:
    k = parse_kernel(args.kernel)
    grid = make_grid(k, args.R, args.h)
    cfg = SolveConfig(T=args.T, dt=args.dt, convolution=args.convolution)
    u0 = Field(grid, np.full(grid.n, args.u0))
    out = integrate(k, u0, cfg)
    dt_eff = cfg.dt if cfg.dt is not None else default_dt(k)
    if args.out:
        write_field_csv(out, args.out, k, dt_eff)
        print(f"wrote {args.out} (n={grid.n}, h={grid.h:g})")
    else:
        write_field_csv(out, "/dev/stdout", k, dt_eff)
    return 0


def cmd_study(args) -> int:
    overrides = {}
    if args.config:
        overrides = _load_config_file(args.config)
    kernel_spec = overrides.get("kernel", args.kernel)
    if kernel_spec is None:
        raise ValueError("kernel: required (flag or config file)")
    R_list = _floats(overrides.get("R", args.R or ""))
    if not R_list:
        raise ValueError("R: at least one radius is required")
    cfg = StudyConfig(
        kernel=parse_kernel(kernel_spec),
        R_list=R_list,
        theta=float(overrides.get("theta", args.theta)),
        t_phys=float(overrides.get("t", args.t)),
        h=float(overrides["h"]) if "h" in overrides else args.h,
        dt=float(overrides["dt"]) if "dt" in overrides else args.dt,
        outdir=overrides.get("outdir", args.outdir),
    )
    report = run_study(cfg)
    print(report.to_json())
    return 0


def cmd_selftest(args) -> int:
    ok = run_selftest(args.suite or None)
    return 0 if ok else 2


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nldiff",
        description="Non-local diffusion: Hamiltonians, conjugates, "
                    "deviation bounds and convergence studies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hamiltonian", help="tabulate H, H', H'' on a p list")
    p.add_argument("--kernel", required=True)
    p.add_argument("--p", required=True, help="comma separated p values")
    p.add_argument("--quadrature", action="store_true",
                   help="force the quadrature path")
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("legendre", help="tabulate L and its maximizer")
    p.add_argument("--kernel", required=True)
    p.add_argument("--q", required=True, help="comma separated q values")
    p.add_argument("--law", action="store_true",
                   help="append the asymptotic-law ratio column")
    p.set_defaults(func=cmd_legendre)

    p = sub.add_parser("rate", help="evaluate the rate function or the bound")
    p.add_argument("--kernel", required=True)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--cap", type=float, default=None)
    p.add_argument("--R", type=float, default=None,
                   help="with --theta: emit the deviation bound prediction")
    p.add_argument("--theta", type=float, default=None)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("solve", help="single solve, CSV field dump")
    p.add_argument("--kernel", required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--u0", type=float, default=1.0,
                   help="constant initial datum")
    p.add_argument("--convolution", choices=["direct", "fft"], default="fft")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("study", help="full deviation study, JSON report")
    p.add_argument("--kernel", default=None)
    p.add_argument("--R", default=None, help="comma separated radii")
    p.add_argument("--theta", type=float, default=0.8)
    p.add_argument("--t", type=float, default=0.1)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--outdir", default=None)
    p.add_argument("--config", default=None,
                   help="flat key=value file; keys override flags")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--suite", nargs="*", choices=sorted(SUITES),
                   metavar="SUITE")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NldiffError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
