"""Root counting on the critical line from the asymptotic formula.

Roots of L_d(-1/2 - i tau) sit where arg G(1/2 + i tau) hits pi/2 mod pi
(d even) or 0 mod pi (d odd), so (1/pi) times the change of the argument
of F(d, 1/2 - i tau) = conj G(1/2 + i tau) counts them.  The argument is
unwrapped along the tau grid with an ArgTracker, halving the step
whenever consecutive values jump too far.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import mpmath

from .critline import RootSet, all_roots
from .saddle import RangeError, asymptotic_F, integral_I, saddle_point, upper_tau
from .specfun import ArgTracker, GridTooCoarseError

COUNT_PREC = 64
MAX_HALVINGS = 12
# quarter-turn correction to the constant -(2d-5)pi/4; see largest_root_estimate
LARGEST_ROOT_OFFSET = -1


def F_on_line(d: int, tau):
    """F(d, 1/2 - i tau)."""
    return asymptotic_F(d, mpmath.mpc(0.5, -tau)).value


def _check_interval(d: int, a, b):
    if a < 0 or b < a or b > upper_tau(d):
        raise RangeError(f"need 0 <= a <= b <= d - d^(1/6), got [{a}, {b}]")


def _arg_rate(d: int, tau) -> float:
    """Upper estimate of |d arg F / d tau| along the line.

    Between saddle points the phase moves like log(1/r) with r = |alpha|,
    and near tau = 0 like log(2d+1) plus the digamma term of Gamma(1/2).
    """
    tau = float(tau)
    if tau <= 0:
        return math.log(2 * d + 1) + 2
    r = tau / (d + math.sqrt(max(d * d - tau * tau, 0.0)))
    return min(math.log(2 * d + 1), -math.log(r)) + 2


def unwrapped_args(d: int, taus, grid_step=None, prec: int = COUNT_PREC):
    """Continuous arg F(d, 1/2 - i tau) at each of the ascending ``taus``.

    The walk between requested points takes steps of at most ``grid_step``
    and at most (pi/4) / rate, so consecutive phases differ by about pi/4;
    the tracker rejects jumps of pi/2 or more, and a rejected step is
    halved (up to MAX_HALVINGS times).
    """
    taus = [mpmath.mpf(t) for t in taus]
    if not taus:
        return []
    with mpmath.workprec(prec):
        tracker = ArgTracker(F_on_line(d, taus[0]), max_jump=mpmath.pi / 2)
        out = [tracker.accumulated]
        for lo, hi in zip(taus[:-1], taus[1:]):
            t = lo
            while t < hi:
                step = (math.pi / 4) / _arg_rate(d, t)
                if grid_step:
                    step = min(step, float(grid_step))
                step = mpmath.mpf(step)
                for _ in range(MAX_HALVINGS + 1):
                    nxt = min(t + step, hi)
                    try:
                        tracker.update(F_on_line(d, nxt))
                        break
                    except GridTooCoarseError:
                        step /= 2
                else:
                    raise GridTooCoarseError(f"argument still jumps after {MAX_HALVINGS} halvings at tau={float(t)}")
                t = nxt
            out.append(tracker.accumulated)
    return out


def count_roots_asymptotic(d: int, a, b, gridStep=0.5, prec: int = COUNT_PREC):
    """(1/pi) * [arg F(d, 1/2 - i b) - arg F(d, 1/2 - i a)], unwrapped."""
    _check_interval(d, a, b)
    if a == b:
        return mpmath.mpf(0)
    first, last = unwrapped_args(d, [a, b], gridStep, prec)
    return (last - first) / mpmath.pi


def count_roots_exact(rs: RootSet, a, b) -> int:
    """Number of stored (tau >= 0) ordinates inside [a, b]."""
    ords = [float(t) for t in rs.ordinates]
    return bisect.bisect_right(ords, float(b)) - bisect.bisect_left(ords, float(a))


@dataclass(frozen=True)
class CountingCurve:
    dim: int
    gridStep: float
    rows: tuple  # (tau, exact, asym, unwrapped_arg); asym includes the offset
    offset: int

    def max_error(self) -> float:
        """Largest |exact - asym| over rows where the asymptotic count exists."""
        return max((abs(e - a) for _, e, a, _ in self.rows if not math.isnan(a)), default=0.0)

    def to_csv(self, digits: int = 10) -> str:
        lines = ["tau,exact,asym,err"]
        for tau, ex, asym, _ in self.rows:
            lines.append(f"{_fmt(tau, digits)},{ex},{_fmt(asym, digits)},{_fmt(ex - asym, digits)}")
        return "\n".join(lines) + "\n"


def _fmt(v, digits: int) -> str:
    if math.isnan(v):
        return "nan"
    s = f"{float(v):.{digits}f}"
    return "0." + "0" * digits if s == "-0." + "0" * digits else s


def fit_integer_offset(exact, raw) -> int:
    """Integer k minimising max |exact - (raw + k)|."""
    diffs = [e - r for e, r in zip(exact, raw)]
    if not diffs:
        return 0
    mid = (max(diffs) + min(diffs)) / 2
    return int(math.floor(mid + 0.5))


def build_counting_curve(d: int, tauMax, gridStep=0.5, roots: RootSet | None = None,
                         prec: int = COUNT_PREC) -> CountingCurve:
    """Exact and asymptotic cumulative counts on the grid 0, gridStep, ..., tauMax.

    Rows past d - d^(1/6), where the asymptotic formula is not used, keep
    the exact count and carry ``nan`` in the asymptotic columns.
    """
    tauMax = float(tauMax)
    if tauMax < 0 or tauMax > d or gridStep <= 0:
        raise RangeError(f"need 0 <= tauMax <= d and gridStep > 0, got {tauMax}, {gridStep}")
    n = int(round(tauMax / gridStep))
    taus = [min(k * gridStep, tauMax) for k in range(n + 1)]
    if roots is None:
        roots = all_roots(d)
    top = upper_tau(d)
    inside = [t for t in taus if t <= top]
    args = unwrapped_args(d, inside, gridStep, prec)
    exact = [count_roots_exact(roots, 0, t) for t in taus]
    raw = [float((a - args[0]) / mpmath.pi) for a in args]
    k = fit_integer_offset(exact, raw)
    nan = float("nan")
    rows = []
    for i, t in enumerate(taus):
        if i < len(args):
            rows.append((t, exact[i], raw[i] + k, float(args[i])))
        else:
            rows.append((t, exact[i], nan, nan))
    return CountingCurve(d, gridStep, tuple(rows), k)


# -- largest root -------------------------------------------------------------

@dataclass(frozen=True)
class LargestRootEstimate:
    d: int
    tauHat: object
    fOfD: float
    scaled: float
    seed: float
    offset: int
    argI: float


def _largest_root_residual(d: int, tau, offset: int):
    sd = saddle_point(d, tau)
    r = abs(sd.alpha.imag)
    arg_i = mpmath.arg(integral_I(sd))
    lhs = -(2 * d + 1) * mpmath.atan(r) + tau * mpmath.log(r)
    rhs = -(2 * d - 5) * mpmath.pi / 4 + offset * mpmath.pi / 2 - arg_i
    return lhs - rhs, arg_i


def largest_root_estimate(d: int, offset: int = LARGEST_ROOT_OFFSET, prec: int = 96) -> LargestRootEstimate:
    """Solve the largest-root phase equation on [d - 3 d^(1/3), d - d^(1/6)].

    ``offset`` is a whole number of pi/2 steps added to the
    constant -(2d-5)pi/4; the default -1 is the value that reproduces the
    exact largest roots (see ``fit_largest_root_offset``).
    """
    if d < 20:
        raise RangeError("largest-root estimate needs d >= 20")
    with mpmath.workprec(prec):
        lo = mpmath.mpf(d) - 3 * mpmath.cbrt(d)
        hi = mpmath.mpf(upper_tau(d))
        f_lo = _largest_root_residual(d, lo, offset)[0]
        f_hi = _largest_root_residual(d, hi, offset)[0]
        if f_lo * f_hi > 0:
            raise ArithmeticError(
                f"bracket [{float(lo):.6f}, {float(hi):.6f}] has residuals "
                f"{float(f_lo):.4g}, {float(f_hi):.4g} of equal sign")
        tau = mpmath.findroot(lambda t: _largest_root_residual(d, t, offset)[0], (lo, hi),
                              solver="illinois", tol=mpmath.ldexp(1, -prec + 16))
        arg_i = _largest_root_residual(d, tau, offset)[1]
        cbrt = mpmath.cbrt(d)
        phase = 3 * mpmath.pi / 2 + offset * mpmath.pi / 2 - arg_i
        seed = cbrt * mpmath.cbrt(mpmath.mpf(9) / 8) * phase ** (mpmath.mpf(2) / 3)
        f = d - tau
        return LargestRootEstimate(d, tau, float(f), float(f / cbrt), float(seed), offset, float(arg_i))


def fit_largest_root_offset(dims=(40, 60, 80), candidates=range(-3, 3)) -> int:
    """Offset (units of pi/2) whose estimates best match the exact largest roots."""
    best, best_err = None, None
    exact = {d: all_roots(d, 64).max_ordinate for d in dims}
    for k in candidates:
        try:
            err = max(abs(float(largest_root_estimate(d, k).tauHat - exact[d])) for d in dims)
        except ArithmeticError:
            continue
        if best_err is None or err < best_err:
            best, best_err = k, err
    if best is None:
        raise ArithmeticError("no candidate offset produced a bracketed solution")
    return best
