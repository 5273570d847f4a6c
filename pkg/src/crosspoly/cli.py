"""Command-line front end: ``crosspoly <command> [options]``.

Data goes to stdout (or ``--out``), diagnostics to stderr.  High-precision
numbers are emitted as decimal strings, also inside JSON.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import mpmath

from . import counting, critline, exactpoly, saddle
from .numfmt import fmt_fixed, fmt_sig, sig_digits

DEFAULT_PRECISION = 128
SLOW_DIM = 300          # exact root work above this needs --slow
TABLE_PLACES = 10


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    precisionBits: int
    epsilon: float
    outDir: Path | None
    format: str
    slow: bool


def _default_precision() -> int:
    env = os.environ.get("CROSSPOLY_PRECISION")
    if env is None:
        return DEFAULT_PRECISION
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"CROSSPOLY_PRECISION={env!r} is not an integer") from None


def _config(args) -> RunConfig:
    prec = args.precision if args.precision is not None else _default_precision()
    if prec < 64:
        raise UsageError("precision must be at least 64 bits")
    if not 0 < args.epsilon < 0.5:
        raise UsageError("epsilon must lie in (0, 0.5)")
    out = Path(args.out) if args.out else None
    return RunConfig(prec, args.epsilon, out, args.format, args.slow)


def _emit(cfg: RunConfig, text: str, default_name: str) -> None:
    if cfg.outDir is None:
        sys.stdout.write(text)
        return
    target = cfg.outDir / default_name if cfg.outDir.is_dir() else cfg.outDir
    target.write_text(text, newline="\n")
    print(f"wrote {target}", file=sys.stderr)


def _need_slow(cfg: RunConfig, d: int, what: str) -> None:
    if d > SLOW_DIM and not cfg.slow:
        raise UsageError(f"{what} for d={d} > {SLOW_DIM} is long-running; pass --slow")


def _s(x, cfg: RunConfig) -> str:
    return fmt_sig(x, sig_digits(cfg.precisionBits))


def _pair(z, cfg: RunConfig) -> list[str]:
    z = mpmath.mpc(z)
    return [_s(z.real, cfg), _s(z.imag, cfg)]


def _json(obj) -> str:
    return json.dumps(obj, indent=None) + "\n"


def parse_dims(text: str) -> list[int]:
    """``100,200,300`` or ``100..300:100`` (or a mix); empty gives []."""
    dims: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ".." in part:
            rng, _, step = part.partition(":")
            lo, _, hi = rng.partition("..")
            step_i = int(step) if step else 1
            if step_i <= 0:
                raise UsageError(f"bad step in {part!r}")
            dims.extend(range(int(lo), int(hi) + 1, step_i))
        else:
            dims.append(int(part))
    return dims


# -- commands ---------------------------------------------------------------

def cmd_poly(args, cfg: RunConfig) -> None:
    p = exactpoly.build_ehrhart(args.dim)
    if cfg.format == "csv":
        text = "degree,coeff\n" + "".join(
            f"{k},{exactpoly._frac_str(c)}\n" for k, c in enumerate(p.coeffs))
        _emit(cfg, text, f"poly_d{args.dim}.csv")
    else:
        _emit(cfg, p.to_json() + "\n", f"poly_d{args.dim}.json")


def cmd_roots(args, cfg: RunConfig) -> None:
    _need_slow(cfg, args.dim, "exact roots")
    rs = critline.all_roots(args.dim, cfg.precisionBits)
    if cfg.format == "json":
        rows = [[_s(t, cfg), mpmath.nstr(r, 6)] for t, r in rs.full()]
        _emit(cfg, _json({"d": rs.dim, "precision": rs.precision, "roots": rows}), f"roots_d{rs.dim}.json")
    else:
        _emit(cfg, rs.to_csv(sig_digits(cfg.precisionBits)), rs.csv_name())


def _parse_x(args) -> mpmath.mpc:
    if args.x is not None:
        try:
            re_s, im_s = args.x.split(",")
            return mpmath.mpc(mpmath.mpf(re_s), mpmath.mpf(im_s))
        except ValueError:
            raise UsageError("--x expects RE,IM") from None
    if args.tau is None:
        raise UsageError("give --x RE,IM or --tau")
    return mpmath.mpc(mpmath.mpf("0.5"), mpmath.mpf(args.tau))


def cmd_asym(args, cfg: RunConfig) -> None:
    x = _parse_x(args)
    av = saddle.asymptotic_F(args.dim, x, cfg.epsilon)
    sd = av.saddle
    out = {
        "d": args.dim,
        "x": _pair(x, cfg),
        "regime": av.regime.value,
        "value": _pair(av.value, cfg),
        "alpha": None if sd is None else ["0", _s(sd.alpha.imag, cfg)],
        "K2": None if sd is None else _s(sd.K2, cfg),
        "K3": None if sd is None else _s(sd.K3, cfg),
        "I": None if av.I is None else _pair(av.I, cfg),
    }
    if args.with_L:
        out["L"] = _pair(saddle.evaluate_L(args.dim, x, cfg.epsilon), cfg)
    if cfg.format == "csv":
        keys = [k for k in out if k != "x"]
        flat = {"re_x": out["x"][0], "im_x": out["x"][1]}
        for k in keys:
            v = out[k]
            if isinstance(v, list):
                flat[f"re_{k}"], flat[f"im_{k}"] = v
            else:
                flat[k] = "" if v is None else str(v)
        text = ",".join(flat) + "\n" + ",".join(flat.values()) + "\n"
        _emit(cfg, text, f"asym_d{args.dim}.csv")
    else:
        _emit(cfg, _json(out), f"asym_d{args.dim}.json")


def cmd_count(args, cfg: RunConfig) -> None:
    n = counting.count_roots_asymptotic(args.dim, args.a, args.b, args.step)
    exact = None
    if args.check_exact:
        _need_slow(cfg, args.dim, "exact roots")
        exact = counting.count_roots_exact(critline.all_roots(args.dim, 64), args.a, args.b)
    if cfg.format == "csv":
        text = f"d,a,b,asym,exact\n{args.dim},{args.a},{args.b},{fmt_fixed(n, 6)},{'' if exact is None else exact}\n"
        _emit(cfg, text, f"count_d{args.dim}.csv")
    else:
        out = {"d": args.dim, "a": args.a, "b": args.b, "asym": fmt_fixed(n, 6), "exact": exact}
        _emit(cfg, _json(out), f"count_d{args.dim}.json")


def cmd_compare(args, cfg: RunConfig) -> None:
    _need_slow(cfg, args.dim, "exact roots")
    curve = counting.build_counting_curve(args.dim, args.max, args.step,
                                          roots=critline.all_roots(args.dim, 64))
    print(f"d={curve.dim} offset={curve.offset} max|err|={curve.max_error():.4f}", file=sys.stderr)
    if cfg.format == "json":
        rows = [[r[0], r[1], r[2], r[1] - r[2]] for r in curve.rows]
        out = {"d": curve.dim, "step": curve.gridStep, "offset": curve.offset,
               "max_err": curve.max_error(), "rows": rows}
        _emit(cfg, json.dumps(out, allow_nan=True) + "\n", f"counting_d{args.dim}.json")
    else:
        _emit(cfg, curve.to_csv(), f"counting_d{args.dim}.csv")


def cmd_largest(args, cfg: RunConfig) -> None:
    est = counting.largest_root_estimate(args.dim, prec=max(96, cfg.precisionBits))
    tau_exact = None
    if args.check_exact:
        _need_slow(cfg, args.dim, "exact roots")
        tau_exact = critline.all_roots(args.dim, cfg.precisionBits).max_ordinate
    out = {
        "d": args.dim,
        "tau_hat": fmt_fixed(est.tauHat, TABLE_PLACES),
        "tau_exact": None if tau_exact is None else fmt_fixed(tau_exact, TABLE_PLACES),
        "f_over_cbrt": fmt_fixed(est.scaled, TABLE_PLACES),
        "seed_f": fmt_fixed(est.seed, TABLE_PLACES),
        "offset": est.offset,
    }
    if cfg.format == "csv":
        text = ",".join(out) + "\n" + ",".join("" if v is None else str(v) for v in out.values()) + "\n"
        _emit(cfg, text, f"largest_d{args.dim}.csv")
    else:
        _emit(cfg, _json(out), f"largest_d{args.dim}.json")


def table1_rows(dims, precision: int):
    for d in dims:
        rs = critline.all_roots(d, precision)
        with mpmath.workprec(precision):
            tau = rs.max_ordinate
            scaled = (d - tau) / mpmath.cbrt(d)
        yield d, tau, scaled


def cmd_table1(args, cfg: RunConfig) -> None:
    dims = parse_dims(args.dims)
    for d in dims:
        if d < 1:
            raise UsageError("dimensions must be positive")
        _need_slow(cfg, d, "exact largest root")
    lines = ["d,tau_max,f_over_cbrt"]
    for d, tau, scaled in table1_rows(dims, cfg.precisionBits):
        lines.append(f"{d},{fmt_fixed(tau, TABLE_PLACES)},{fmt_fixed(scaled, TABLE_PLACES)}")
    _emit(cfg, "\n".join(lines) + "\n", "table1.csv")


# -- parser -------------------------------------------------------------------

def _common(defaults: bool) -> argparse.ArgumentParser:
    sup = None if defaults else argparse.SUPPRESS
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--precision", type=int, default=sup,
                   help="working precision in bits (default: $CROSSPOLY_PRECISION or 128)")
    p.add_argument("--epsilon", type=float, default=0.05 if defaults else sup,
                   help="keep Re x inside [eps, 1-eps] (default 0.05)")
    p.add_argument("--out", default=sup, help="output file, or directory for canonical file names")
    p.add_argument("--format", choices=("csv", "json"), default=sup)
    p.add_argument("--slow", action="store_true", default=False if defaults else sup,
                   help=f"allow exact-root work for d > {SLOW_DIM}")
    return p


def build_parser() -> argparse.ArgumentParser:
    sub_common = _common(defaults=False)
    parser = argparse.ArgumentParser(prog="crosspoly", parents=[_common(defaults=True)],
                                     description="Exact roots and asymptotics of cross-polytope Ehrhart polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", parents=[sub_common], help="exact polynomial as JSON")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_poly, fmt_default="json")

    p = sub.add_parser("roots", parents=[sub_common], help="certified roots on Re z = -1/2")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_roots, fmt_default="csv")

    p = sub.add_parser("asym", parents=[sub_common], help="asymptotic F(d, x)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--x", help="RE,IM")
    p.add_argument("--tau", help="shorthand for x = 1/2 + i*tau")
    p.add_argument("--with-L", action="store_true", help="also report the approximation of L_d(-x)")
    p.set_defaults(func=cmd_asym, fmt_default="json")

    p = sub.add_parser("count", parents=[sub_common], help="asymptotic root count on [a, b]")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--check-exact", action="store_true")
    p.set_defaults(func=cmd_count, fmt_default="json")

    p = sub.add_parser("compare", parents=[sub_common], help="exact vs asymptotic counting curve")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max", type=float, required=True)
    p.add_argument("--step", type=float, default=0.5)
    p.set_defaults(func=cmd_compare, fmt_default="csv")

    p = sub.add_parser("largest", parents=[sub_common], help="largest-root estimate")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--check-exact", action="store_true")
    p.set_defaults(func=cmd_largest, fmt_default="json")

    p = sub.add_parser("table1", parents=[sub_common], help="largest exact root per dimension")
    p.add_argument("--dims", default="", help="e.g. 100,200,300 or 100..300:100")
    p.set_defaults(func=cmd_table1, fmt_default="csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.fmt_default
    try:
        cfg = _config(args)
        with mpmath.workprec(cfg.precisionBits):
            args.func(args, cfg)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"crosspoly: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
