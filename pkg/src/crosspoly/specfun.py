"""Complex special functions at a runtime-chosen precision.

Everything works on mpmath numbers inside the caller's ``workprec``.
``gamma`` is a self-contained Stirling implementation (shift, then the
asymptotic series with a truncation bound) so the precision scaling is
explicit; mpmath's own gamma is used only as a test oracle.
"""
from __future__ import annotations

import math

import mpmath


class PoleError(ValueError):
    pass


class ZeroBaseError(ValueError):
    pass


class GridTooCoarseError(ArithmeticError):
    pass


_BERNOULLI: list = []


def _bernoulli_even(k: int):
    """B_{2k} as an exact mpmath fraction (cached)."""
    while len(_BERNOULLI) <= k:
        _BERNOULLI.append(mpmath.bernfrac(2 * len(_BERNOULLI)))
    return _BERNOULLI[k]


def _stirling_shift(prec: int) -> float:
    # with |z| >= c*prec the series terms decay well before they turn around
    return 0.25 * prec + 10


def log_gamma(z):
    """Principal-ish log Gamma(z) for Re z > 0 via shifted Stirling.

    The imaginary part is the continuous branch obtained by summing logs,
    which is all ``gamma`` needs (it exponentiates).
    """
    prec = mpmath.mp.prec
    z = mpmath.mpc(z)
    # exp() turns absolute error in log Gamma into relative error, so pay for |z log z|
    wp = prec + 20 + int(math.log2(prec)) + 2 * int(mpmath.log(abs(z) + 2, 2))
    with mpmath.workprec(wp):
        shift = 0
        threshold = _stirling_shift(prec)
        # shift until |z + shift| is large; the recurrence supplies the rest
        if abs(z) < threshold:
            need = threshold - z.real
            shift = max(0, int(mpmath.ceil(need)))
        w = z + shift
        s = (w - 0.5) * mpmath.log(w) - w + mpmath.log(2 * mpmath.pi) / 2
        w2 = w * w
        wpow = w
        tol = mpmath.ldexp(1, -wp)
        for k in range(1, 4 * wp):
            b = _bernoulli_even(k)
            p, q = b
            term = mpmath.mpf(p) / (q * (2 * k) * (2 * k - 1)) / wpow
            s += term
            # remainder of the alternating Stirling series is bounded by the
            # first omitted term times sec(arg w / 2)**(2k+2); Re w > 0 keeps that below 2**(k+1)
            if abs(term) < tol * abs(s) / 2 ** (k + 2):
                break
            wpow *= w2
        else:
            raise ArithmeticError("Stirling series did not converge")
        if shift:
            prod = mpmath.mpc(1)
            for j in range(shift):
                prod *= z + j
            s -= mpmath.log(prod)
        return s


def gamma(z):
    """Gamma(z) with relative error below 2**(16 - prec)."""
    z = mpmath.mpc(z)
    if z.imag == 0 and z.real <= 0 and z.real == mpmath.floor(z.real):
        raise PoleError(f"Gamma has a pole at {z.real}")
    prec = mpmath.mp.prec
    with mpmath.workprec(prec + 20):
        if z.real < mpmath.mpf(0.5):
            # reflection keeps the Stirling part in the right half-plane
            val = mpmath.pi / (sin_pi(z) * mpmath.exp(log_gamma(1 - z)))
        else:
            val = mpmath.exp(log_gamma(z))
    return +val


def pow_principal(base, expo):
    """exp(expo * Log base) with the principal logarithm."""
    base = mpmath.mpc(base)
    if base == 0:
        raise ZeroBaseError("zero base has no principal logarithm")
    return mpmath.exp(expo * mpmath.log(base))


def sin_pi(x):
    """sin(pi x), reducing Re x mod 2 exactly before scaling by pi."""
    x = mpmath.mpc(x)
    a, b = x.real, x.imag
    a = a - 2 * mpmath.floor(a / 2)  # exact for binary floats
    pb = mpmath.pi * b
    return mpmath.mpc(mpmath.sinpi(a) * mpmath.cosh(pb), mpmath.cospi(a) * mpmath.sinh(pb))


class ArgTracker:
    """Continuous argument along a sequence of nonzero complex values."""

    def __init__(self, first, max_jump=None):
        first = mpmath.mpc(first)
        if first == 0:
            raise ValueError("cannot track the argument through zero")
        self.last = first
        self.accumulated = mpmath.arg(first)
        self.start = self.accumulated
        self.max_jump = mpmath.pi if max_jump is None else mpmath.mpf(max_jump)

    def update(self, v):
        v = mpmath.mpc(v)
        if v == 0:
            raise ValueError("cannot track the argument through zero")
        jump = mpmath.arg(v / self.last)
        if abs(jump) >= self.max_jump:
            raise GridTooCoarseError(f"argument jump {float(jump):.3f} too large")
        self.accumulated += jump
        self.last = v
        return self.accumulated

    @property
    def variation(self):
        """Total unwrapped change since construction."""
        return self.accumulated - self.start


def track_arg(tracker: ArgTracker, v):
    return tracker, tracker.update(v)
