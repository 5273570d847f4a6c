"""Roots of L_d on the line Re z = -1/2.

Writing L_d(-1/2 + i*tau) = i**(d % 2) * R(tau) gives a real polynomial R of
degree d and parity d.  All arithmetic that decides *where* a root is
happens on integers: with s = 2*tau,

    S(s) = 2**d * d! * R(s / 2) = s**(d % 2) * P(s**2)

has integer coefficients, and P (degree d // 2) carries the positive roots.
Signs of P at dyadic rationals are exact, so a sign change is a proof.
Newton refinement runs in mpmath and is certified afterwards by two exact
sign evaluations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import gmpy2
import mpmath

from .exactpoly import build_ehrhart, ehrhart_numerators
from .numfmt import fmt_sig, sig_digits

DEFAULT_TARGET_BITS = 128
STURM_CAP = 300
MAX_GRID_HALVINGS = 12
MAX_REFINE_RETRIES = 4


class ConsistencyError(ArithmeticError):
    """An exact invariant failed; indicates a bug or a falsified root claim."""


class NotSquarefreeError(ConsistencyError):
    pass


class PrecisionEscalationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CriticalLinePoly:
    dim: int
    rcoeffs: tuple[Fraction, ...]
    parity_factor: complex
    scoeffs: tuple[int, ...]
    half: tuple[int, ...]

    def __call__(self, tau):
        acc = Fraction(0)
        for c in reversed(self.rcoeffs):
            acc = acc * tau + c
        return acc

    @property
    def odd(self) -> int:
        return self.dim % 2


def critical_line_polynomial(d: int) -> CriticalLinePoly:
    if d < 1:
        raise ValueError("need d >= 1")
    nums = ehrhart_numerators(d)
    # x = (v - 1) / 2  =>  2**d d! L = sum_k nums[k] 2**(d-k) (v - 1)**k
    a = [c << (d - k) for k, c in enumerate(nums)]
    for i in range(d + 1):  # Taylor shift v -> v - 1
        for k in range(d - 1, i - 1, -1):
            a[k] -= a[k + 1]
    # v = 2x + 1 = i*s; i**k / i**(d % 2) is real when k = d mod 2
    scoeffs = []
    for k, c in enumerate(a):
        if (k - d) % 2:
            if c:
                raise ConsistencyError(f"coefficient {k} of the shifted polynomial is not real")
            scoeffs.append(0)
        else:
            scoeffs.append(-c if ((k - d % 2) // 2) % 2 else c)
    den = (1 << d) * factorial(d)
    rcoeffs = tuple(Fraction(c << k, den) for k, c in enumerate(scoeffs))
    half = tuple(scoeffs[d % 2::2])
    return CriticalLinePoly(d, rcoeffs, 1j if d % 2 else 1, tuple(scoeffs), half)


# -- exact sign evaluation -------------------------------------------------

def _sign_half(half, a: int, e: int) -> int:
    """Sign of P(w) at w = a / 2**e, computed exactly."""
    n = len(half) - 1
    acc = gmpy2.mpz(half[n])
    for j in range(n - 1, -1, -1):
        acc = acc * a + (gmpy2.mpz(half[j]) << (e * (n - j)))
    return (acc > 0) - (acc < 0)


def _sign_p_at_s(cp: CriticalLinePoly, s: Fraction) -> int:
    """Sign of P(s**2) for a dyadic rational s."""
    if s == 0:
        return (cp.half[0] > 0) - (cp.half[0] < 0)
    num, den = s.numerator, s.denominator
    e = den.bit_length() - 1
    if den != 1 << e:
        raise ValueError("dyadic rationals only")
    return _sign_half(cp.half, num * num, 2 * e)


def _frac_to_mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


# -- Sturm sequences --------------------------------------------------------

def _primitive(p):
    g = gmpy2.mpz(0)
    for c in p:
        g = gmpy2.gcd(g, c)
        if g == 1:
            return p
    return [c // g for c in p]


def sturm_chain(coeffs) -> list[list]:
    """Sturm sequence of an integer polynomial (ascending coefficients).

    Pseudo-remainders use a positive multiplier |lc|**k, so signs match
    the rational Euclidean chain; every member is made primitive.
    """
    p0 = [gmpy2.mpz(c) for c in coeffs]
    while p0 and p0[-1] == 0:
        p0.pop()
    chain = [_primitive(p0), _primitive([i * p0[i] for i in range(1, len(p0))])]
    while len(chain[-1]) > 1:
        a, b = list(chain[-2]), chain[-1]
        lb, db = b[-1], len(b) - 1
        mult, flip = abs(lb), (1 if lb > 0 else -1)
        while len(a) - 1 >= db:
            shift = len(a) - 1 - db
            f = a[-1] * flip
            a = [c * mult for c in a]
            for i, c in enumerate(b):
                a[i + shift] -= f * c
            while a and a[-1] == 0:
                a.pop()
            if not a:
                break
        if not a:
            raise NotSquarefreeError(f"gcd(R, R') has degree {db}")
        chain.append(_primitive([-c for c in a]))
    return chain


def _variations(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def sturm_count(cp: CriticalLinePoly) -> int:
    """Number of distinct real roots of R over the whole line."""
    chain = sturm_chain(cp.scoeffs)
    at_minus_inf = _variations([p[-1] if (len(p) - 1) % 2 == 0 else -p[-1] for p in chain])
    at_plus_inf = _variations([p[-1] for p in chain])
    return at_minus_inf - at_plus_inf


# -- isolation ------------------------------------------------------------

def _fujiwara_bound_s(half) -> int:
    """Integer B with every root w of P satisfying |w| < B**2."""
    n = len(half) - 1
    lead = abs(half[n])
    best = 1
    for k in range(1, n + 1):
        c = abs(half[n - k])
        if not c:
            continue
        if k == n:
            c = (c + 1) // 2
        root = int(gmpy2.iroot(gmpy2.mpz(c // lead + 1), k)[0]) + 1
        best = max(best, root)
    w_bound = 2 * best
    return math.isqrt(w_bound) + 1


def isolate_roots(cp: CriticalLinePoly, check_sturm: bool | None = None) -> list[tuple[Fraction, Fraction]]:
    """Disjoint closed tau-intervals, one per real root of R, ascending.

    A degree-d polynomial showing d sign changes (or exact zeros) on d
    disjoint intervals has exactly one simple root in each, so the grid
    search certifies itself.  For d <= STURM_CAP the Sturm count is checked
    as well (this also confirms R is squarefree).
    """
    d = cp.dim
    if check_sturm is None:
        check_sturm = d <= STURM_CAP
    if check_sturm:
        n_real = sturm_count(cp)
        if n_real != d:
            raise ConsistencyError(f"Sturm count {n_real} != degree {d}")
    need = len(cp.half) - 1
    if cp.half[0] == 0:
        raise NotSquarefreeError("tau = 0 is a multiple root")
    s_max = _fujiwara_bound_s(cp.half)

    step = Fraction(1, 4)
    samples: dict[Fraction, int] = {}
    brackets: list[tuple[Fraction, Fraction]] = []
    for _ in range(MAX_GRID_HALVINGS):
        n_pts = int(s_max / step) + 1
        for j in range(n_pts + 1):
            s = step * j
            if s not in samples:
                samples[s] = _sign_p_at_s(cp, s)
        brackets = _brackets_from(samples)
        if len(brackets) == need:
            break
        if len(brackets) > need:
            raise ConsistencyError("more sign changes than the degree allows")
        step /= 2
    else:
        raise ConsistencyError(f"found {len(brackets)} of {need} positive roots")

    pos = [(lo / 2, hi / 2) for lo, hi in brackets]
    out = [(-hi, -lo) for lo, hi in reversed(pos)]
    if cp.odd:
        out.append((Fraction(0), Fraction(0)))
    out.extend(pos)
    return out


def _brackets_from(samples: dict[Fraction, int]) -> list[tuple[Fraction, Fraction]]:
    pts = sorted(samples)
    out = []
    prev_s, prev_sign = pts[0], samples[pts[0]]
    for s in pts[1:]:
        sign = samples[s]
        if sign == 0:
            out.append((s, s))
            prev_sign = 0  # the flip across an exact root is already counted
            continue
        if prev_sign and sign != prev_sign:
            out.append((prev_s, s))
        prev_s, prev_sign = s, sign
    return out


# -- refinement -------------------------------------------------------------

def _horner_half(half_fp, w):
    """P(w), P'(w) and sum |p_j| w**j in the active gmpy2 context."""
    p = gmpy2.mpfr(0)
    dp = gmpy2.mpfr(0)
    bound = gmpy2.mpfr(0)
    aw = abs(w)
    for c in reversed(half_fp):
        dp = dp * w + p
        p = p * w + c
        bound = bound * aw + abs(c)
    return p, dp, bound


def _fp_to_fraction(x) -> Fraction:
    num, den = x.as_integer_ratio()
    return Fraction(int(num), int(den))


def _fp_to_mpf(x):
    man, exp = x.as_mantissa_exp()
    return mpmath.mpf((int(man), int(exp)))


def _guard_bits(cp: CriticalLinePoly, s: Fraction) -> int:
    """Bits lost to cancellation when locating a root of P(s**2) near s.

    Compares sum |p_j| w**j with |w P'(w)|, both evaluated exactly at the
    dyadic point w = s**2 (a float estimate of P' is itself swamped by the
    cancellation it is meant to measure).
    """
    num, den = s.numerator, s.denominator
    e = 2 * (den.bit_length() - 1)
    a = gmpy2.mpz(num) ** 2
    n = len(cp.half) - 1
    bound = gmpy2.mpz(0)
    deriv = gmpy2.mpz(0)
    for j in range(n, -1, -1):
        c = gmpy2.mpz(cp.half[j])
        bound = bound * a + (abs(c) << (e * (n - j)))
        deriv = deriv * a + ((j * c) << (e * (n - j)))
    if deriv == 0:
        return 2 * n + 64
    return max(0, bound.bit_length() - abs(deriv).bit_length()) + 2 * (n + 1).bit_length() + 8


def refine_root(cp: CriticalLinePoly, interval, target_bits: int = DEFAULT_TARGET_BITS):
    """Refine one isolating interval to relative accuracy 2**-target_bits.

    Returns ``(tau, radius)``: an mpf at ``target_bits + 32`` bits and a
    radius for which the exact signs of R at tau - radius and tau + radius
    differ.  The root at tau = 0 (odd d) is exact.
    """
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    if lo == hi:
        with mpmath.workprec(target_bits + 32):
            return _frac_to_mpf(lo), mpmath.mpf(0)
    if hi <= 0:
        tau, rad = refine_root(cp, (-hi, -lo), target_bits)
        return mpmath.fneg(tau, exact=True), rad
    if lo < 0:
        raise ValueError("interval straddles tau = 0")
    s_lo, s_hi = 2 * lo, 2 * hi
    if _sign_p_at_s(cp, s_lo) * _sign_p_at_s(cp, s_hi) >= 0:
        raise ValueError("interval does not bracket a sign change")

    wp = target_bits + 40 + _guard_bits(cp, (s_lo + s_hi) / 2)
    for _ in range(MAX_REFINE_RETRIES):
        with gmpy2.context(gmpy2.get_context(), precision=wp):
            s_hat = _newton_bracketed(cp, s_lo, s_hi, target_bits + 8)
            rad_s = abs(s_hat) * gmpy2.exp2(-target_bits)
            left = _fp_to_fraction(s_hat - rad_s)
            right = _fp_to_fraction(s_hat + rad_s)
        inside = s_lo <= left and right <= s_hi
        if inside and _sign_p_at_s(cp, left) * _sign_p_at_s(cp, right) < 0:
            with mpmath.workprec(target_bits + 32):
                return _fp_to_mpf(s_hat) / 2, _fp_to_mpf(rad_s) / 2
        wp += max(64, wp // 2)
    raise PrecisionEscalationError(f"could not certify root in [{float(lo)}, {float(hi)}]")


def _newton_bracketed(cp, s_lo: Fraction, s_hi: Fraction, stop_bits: int):
    """Newton on f(s) = P(s**2), falling back to bisection outside the bracket."""
    half = [gmpy2.mpfr(c) for c in cp.half]
    a = gmpy2.mpfr(s_lo)
    b = gmpy2.mpfr(s_hi)
    sign_a = _sign_p_at_s(cp, s_lo)
    x = (a + b) / 2
    tol = b * gmpy2.exp2(-stop_bits)
    for _ in range(4 * gmpy2.get_context().precision):
        p, dp, _ = _horner_half(half, x * x)
        if p == 0:
            return x
        if (p > 0) == (sign_a > 0):
            a = x
        else:
            b = x
        deriv = 2 * x * dp
        nxt = x - p / deriv if deriv else None
        if nxt is None or not (a < nxt < b):
            x = (a + b) / 2
            if b - a < tol:
                return x
            continue
        step = abs(nxt - x)
        x = nxt
        if step < tol:
            return x
    return x


@dataclass(frozen=True)
class RootSet:
    """Nonnegative root ordinates of L_d on the critical line.

    Negative ordinates are the mirror images; ``tau = 0`` is stored iff d
    is odd.
    """

    dim: int
    precision: int
    ordinates: tuple
    radii: tuple

    def full(self) -> list[tuple]:
        """All d roots over the whole line as ``(tau, radius)``, ascending."""
        pos = list(zip(self.ordinates, self.radii))
        neg = [(mpmath.fneg(t, exact=True), r) for t, r in reversed(pos) if t != 0]
        return neg + pos

    def __len__(self) -> int:
        return len(self.full())

    @property
    def max_ordinate(self):
        return self.ordinates[-1]

    def to_csv(self, digits: int | None = None) -> str:
        """``tau,err_radius`` rows over the whole line, ascending."""
        if digits is None:
            digits = sig_digits(self.precision)
        lines = ["tau,err_radius"]
        for tau, rad in self.full():
            lines.append(f"{fmt_sig(tau, digits)},{mpmath.nstr(rad, 6)}")
        return "\n".join(lines) + "\n"

    def csv_name(self) -> str:
        return f"roots_d{self.dim}.csv"


def all_roots(d: int, target_bits: int = DEFAULT_TARGET_BITS, check_sturm: bool | None = None) -> RootSet:
    cp = critical_line_polynomial(d)
    intervals = isolate_roots(cp, check_sturm=check_sturm)
    ords, rads = [], []
    for iv in intervals:
        if iv[1] < 0:
            continue
        t, r = refine_root(cp, iv, target_bits)
        ords.append(t)
        rads.append(r)
    return RootSet(d, target_bits, tuple(ords), tuple(rads))


def residual(d: int, tau, prec: int = DEFAULT_TARGET_BITS):
    """|L_d(-1/2 + i tau)| through the monomial expansion (residual certificate)."""
    from .exactpoly import eval_exact

    p = build_ehrhart(d)
    with mpmath.workprec(prec):
        z = mpmath.mpc(-0.5, tau)
    return abs(eval_exact(p, z, prec))
