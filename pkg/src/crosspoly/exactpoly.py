"""Exact Ehrhart polynomial of the cross-polytope and two brute-force oracles.

``build_ehrhart(d)`` expands

    L_d(x) = sum_j C(d, j) * C(d - j + x, d)

into monomial coefficients with integer arithmetic over the common
denominator d!.  The oracles (lattice enumeration and the Taylor series of
(1+t)^d / (1-t)^(d+1)) never touch that expansion.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import mpmath

MIN_PRECISION = 64
LATTICE_CAP = 8


class SizeError(ValueError):
    pass


@dataclass(frozen=True)
class ExactPolynomial:
    dim: int
    coeffs: tuple[Fraction, ...]
    _mp_cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(self.coeffs) != self.dim + 1 or self.coeffs[-1] == 0:
            raise ValueError("need exactly dim+1 coefficients with nonzero leading term")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Exact evaluation at an int or Fraction."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def mp_coeffs(self, wp: int):
        """Coefficients rounded once to ``wp`` bits (cached per precision)."""
        got = self._mp_cache.get(wp)
        if got is None:
            with mpmath.workprec(wp):
                got = [mpmath.mpf(c.numerator) / c.denominator for c in self.coeffs]
            self._mp_cache[wp] = got
        return got

    def to_json(self) -> str:
        return json.dumps({"dim": self.dim, "coeffs": [_frac_str(c) for c in self.coeffs]})

    @classmethod
    def from_json(cls, text: str) -> "ExactPolynomial":
        obj = json.loads(text)
        return cls(int(obj["dim"]), tuple(Fraction(c) for c in obj["coeffs"]))


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mul_linear(p: list[int], a: int) -> list[int]:
    """p(x) * (x + a), ascending integer coefficients."""
    out = [0] * (len(p) + 1)
    for i, c in enumerate(p):
        out[i + 1] += c
        out[i] += a * c
    return out


def _div_linear(p: list[int], a: int) -> list[int]:
    """Exact quotient p(x) / (x + a); raises if the division leaves a remainder."""
    root = -a
    q = [0] * (len(p) - 1)
    acc = 0
    for i in range(len(p) - 1, 0, -1):
        acc = acc * root + p[i]
        q[i - 1] = acc
    if acc * root + p[0] != 0:
        raise ArithmeticError("inexact linear division")
    return q


def ehrhart_numerators(d: int) -> list[int]:
    """Integer coefficients of d! * L_d(x), ascending by degree."""
    if d < 0:
        raise ValueError("dimension must be nonnegative")
    # falling[n] = prod_{k=0}^{d-1} (x + n - k) = d! * C(x + n, d); walk n = 0..d
    falling = [1]
    for k in range(d):
        falling = _mul_linear(falling, -k)
    total = [0] * (d + 1)
    for n in range(d + 1):
        if n:
            falling = _div_linear(_mul_linear(falling, n), n - d)
        weight = comb(d, n)  # C(d, j) with n = d - j
        for i, c in enumerate(falling):
            total[i] += weight * c
    return total


def build_ehrhart(d: int) -> ExactPolynomial:
    nums = ehrhart_numerators(d)
    den = factorial(d)
    return ExactPolynomial(d, tuple(Fraction(c, den) for c in nums))


def eval_exact(p: ExactPolynomial, z, prec: int = 128):
    """Evaluate ``p`` at complex ``z`` to relative accuracy about 2**(8 - prec).

    Working precision grows until the Horner rounding bound (degree times
    the absolute-value sum, times 2**-wp) sits below the target.
    """
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits")
    n = p.degree
    wp = prec + 16 + n.bit_length()
    for _ in range(12):
        with mpmath.workprec(wp):
            zc = mpmath.mpc(z)
            az = abs(zc)
            acc = mpmath.mpc(0)
            bound = mpmath.mpf(0)
            for c in reversed(p.mp_coeffs(wp)):
                acc = acc * zc + c
                bound = bound * az + abs(c)
            err = bound * (2 * n + 2) * mpmath.ldexp(1, -wp)
            mag = abs(acc)
            if err == 0 or (mag > 0 and err <= mag * mpmath.ldexp(1, -prec - 4)):
                with mpmath.workprec(prec):
                    return +acc
            if mag == 0:
                # an exact zero at this precision: only the bound is meaningful
                if bound == 0 or wp > prec + 4 * n + 4096:
                    with mpmath.workprec(prec):
                        return +acc
                wp *= 2
            else:
                lost = int(mpmath.log(err / mag, 2)) + prec + 8
                wp += max(lost, 32)
    with mpmath.workprec(prec):
        return +acc


def lattice_count_oracle(d: int, m: int) -> int:
    """Count z in Z^d with sum |z_i| <= m by walking every coordinate prefix."""
    if d < 0 or m < 0:
        raise ValueError("d and m must be nonnegative")
    if d > LATTICE_CAP or m > LATTICE_CAP:
        raise SizeError(f"brute force limited to d, m <= {LATTICE_CAP}")

    def walk(dims_left: int, budget: int) -> int:
        if dims_left == 0:
            return 1
        total = 0
        for z in range(-budget, budget + 1):
            total += walk(dims_left - 1, budget - abs(z))
        return total

    return walk(d, m)


def gen_series_coeffs(d: int, M: int) -> list[int]:
    """First M+1 Taylor coefficients of (1+t)^d / (1-t)^(d+1)."""
    if d < 0 or M < 0:
        raise ValueError("d and M must be nonnegative")
    numer = [comb(d, j) for j in range(min(d, M) + 1)]
    # 1/(1-t)^(d+1): divide by (1-t) d+1 times, i.e. take prefix sums
    series = numer + [0] * (M + 1 - len(numer))
    for _ in range(d + 1):
        run = 0
        for i in range(M + 1):
            run += series[i]
            series[i] = run
    return series

