"""Locale-free decimal rendering of mpmath numbers with round-half-even."""
from __future__ import annotations

import math
from decimal import ROUND_HALF_EVEN, Context, Decimal

import mpmath


def to_decimal(x) -> Decimal:
    """Exact Decimal value of a binary float (mpf or float)."""
    x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError("cannot format a non-finite value")
    man, exp = x.man_exp
    man, exp = int(man), int(exp)
    if x < 0 and man > 0:
        man = -man
    if man == 0:
        return Decimal(0)
    if exp >= 0:
        return Decimal(man << exp)
    # man / 2^k = man * 5^k / 10^k, exact
    k = -exp
    return Decimal(f"{man * 5 ** k}E-{k}")


def sig_digits(prec_bits: int) -> int:
    """Digits worth printing at a working precision: bits*log10(2) - 4."""
    return max(1, int(prec_bits * math.log10(2)) - 4)


def fmt_sig(x, digits: int) -> str:
    d = to_decimal(x)
    if d == 0:
        return "0"
    ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    out = ctx.plus(d)
    if out.adjusted() >= digits or out.adjusted() < -6:
        # positional form would invent zeros or bury the digits
        return str(out.normalize(ctx))
    return _plain(out)


def fmt_fixed(x, places: int) -> str:
    d = to_decimal(x).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN,
                               context=Context(prec=10_000))
    s = format(d, "f")
    return s[1:] if s.startswith("-") and d == 0 else s


def _plain(d: Decimal) -> str:
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s
