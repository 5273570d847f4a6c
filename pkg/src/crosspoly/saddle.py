"""Steepest-descent approximation of L_d(-x).

With E_d(t) = (1+t)^d / (1-t)^(d+1), the exact split

    L_d(-x) = G(x) + (-1)^d * conj G(1 - conj x),
    G(x) = (sin(pi x) / pi) * int_0^1 E_d(-t) t^(x-1) dt,

holds for 0 < Re x < 1.  ``asymptotic_F`` approximates G: near the real
axis by (sin(pi x)/pi) (2d+1)^(-x) Gamma(x), and for larger |Im x| by the
saddle-point formula

    G(x) ~ (3 / 4pi) (K2 / K3) E_d(alpha) alpha^x I(lambda),
    I(lambda) = int_{-1/3}^inf exp(-lambda F(T)) U'(T) dT,

with lambda = (9/8) tau K2^3 / K3^2.  Everything runs at the caller's
mpmath precision.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath
from mpmath.calculus.quadrature import GaussLegendre

from .specfun import gamma, pow_principal, sin_pi

DEFAULT_EPSILON = 0.05
LAMBDA_FACTOR = mpmath.mpf(9) / 8
BASE_DEGREE = 4          # 24-point Gauss-Legendre panels checked against 48
NODE_BUDGET = 200_000


class RangeError(ValueError):
    pass


class QuadratureError(ArithmeticError):
    pass


class Regime(enum.Enum):
    NEAR_ZERO = "NEAR_ZERO"
    SADDLE = "SADDLE"


def upper_tau(d: int) -> float:
    """Right end d - d^(1/6) of the range where the saddle formula is used."""
    return d - d ** (1.0 / 6)


def regime_threshold(d: int) -> float:
    return math.sqrt(math.log(d)) if d > 1 else 0.0


# -- saddle point -----------------------------------------------------------

@dataclass(frozen=True)
class SaddleData:
    d: int
    tau: object
    alpha: object
    K: dict = field(repr=False)
    lam: object

    @property
    def K2(self):
        return self.K[2]

    @property
    def K3(self):
        return self.K[3]

    @property
    def K4(self):
        return self.K[4]


def _C(d, tau, alpha, m: int):
    sgn = -1 if m % 2 == 0 else 1
    return sgn * d / (1 + alpha) ** m + d / (1 - alpha) ** m + sgn * 1j * tau / alpha ** m


def K_from_C(d, tau, alpha, m: int):
    """K_m by normalising C_m = -(-i)^(m-1) (tau / |alpha|^m) K_m."""
    scale = -((-1j) ** (m - 1)) * tau / abs(alpha) ** m
    return _C(d, tau, alpha, m) / scale


def K_closed_form(d, tau, alpha, m: int):
    sgn = 1 if m % 2 else -1
    bracket = sgn * ((1 - alpha) / 2) ** m + ((1 + alpha) / 2) ** m
    return 1 - (1j * tau / d) ** (m - 1) * bracket


def saddle_point(d: int, tau, strict: bool = True) -> SaddleData:
    """Saddle alpha = -i (d/tau - sqrt(d^2/tau^2 - 1)) inside the unit disk."""
    tau = mpmath.mpf(tau)
    top = upper_tau(d) if strict else d
    if not (0 < tau <= top):
        raise RangeError(f"tau={mpmath.nstr(tau, 8)} outside (0, {top:.6g}]")
    q = d / tau
    # q - sqrt(q^2 - 1) rewritten as 1/(q + sqrt(..)) to avoid cancellation
    r = 1 / (q + mpmath.sqrt((q - 1) * (q + 1)))
    alpha = mpmath.mpc(0, -r)
    K = {}
    for m in (2, 3, 4):
        K[m] = mpmath.re(K_from_C(d, tau, alpha, m))
    # K2 has a cancellation-free closed form; use it
    K[2] = mpmath.sqrt((d - tau) * (d + tau)) / d
    lam = LAMBDA_FACTOR * tau * K[2] ** 3 / K[3] ** 2
    return SaddleData(d, tau, alpha, K, lam)


# -- profile functions ------------------------------------------------------

def _check_T(T):
    if not T > mpmath.mpf(-1) / 3:
        raise RangeError("T must exceed -1/3")


def F_of_T(T):
    T = mpmath.mpf(T)
    _check_T(T)
    return 2 * T ** 2 * (2 * T + 1) ** 2 * mpmath.sqrt(T + 1) / (3 * T + 1) ** mpmath.mpf(1.5)


def U_and_derivative(T):
    T = mpmath.mpf(T)
    _check_T(T)
    g = mpmath.sqrt((T + 1) / (3 * T + 1))
    U = T * mpmath.mpc(g, 1)
    dU = mpmath.mpc(g * (3 * T ** 2 + 3 * T + 1) / ((T + 1) * (3 * T + 1)), 1)
    return U, dU


def _left_integrand(lam, w):
    """Integrand on T in (-1/3, 0) after T = (w^-2 - 1)/3, w in (1, inf)."""
    iw2 = 1 / (w * w)
    T = (iw2 - 1) / 3
    Tp1 = (iw2 + 2) / 3
    F = 2 * T ** 2 * ((2 * iw2 + 1) / 3) ** 2 * mpmath.sqrt(Tp1) * w ** 3
    g = mpmath.sqrt((1 + 2 * w * w) / 3)
    re_du = g * (3 * T ** 2 + 3 * T + 1) * w * w / Tp1
    jac = mpmath.mpf(2) / 3 / w ** 3
    return mpmath.exp(-lam * F) * mpmath.mpc(re_du, 1) * jac


def _right_integrand(lam, T):
    _, du = U_and_derivative(T)
    return mpmath.exp(-lam * F_of_T(T)) * du


def _left_F(w):
    iw2 = 1 / (w * w)
    T = (iw2 - 1) / 3
    return 2 * T ** 2 * ((2 * iw2 + 1) / 3) ** 2 * mpmath.sqrt((iw2 + 2) / 3) * w ** 3


def _solve_increasing(f, target, lo):
    """Smallest-ish x > lo with f(x) >= target (doubling then bisection)."""
    step = mpmath.mpf(1) / 4
    hi = lo + step
    while f(hi) < target:
        lo, hi = hi, lo + 2 * (hi - lo)
        if hi > 1e6:
            raise QuadratureError("truncation point not found")
    for _ in range(60):
        mid = (lo + hi) / 2
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


_NODE_CACHE: dict = {}


def _gl_nodes(degree: int, prec: int):
    key = (degree, prec)
    got = _NODE_CACHE.get(key)
    if got is None:
        got = GaussLegendre(mpmath.mp).calc_nodes(degree, prec)
        _NODE_CACHE[key] = got
    return got


def _panel(f, a, b, nodes):
    h = (b - a) / 2
    c = (a + b) / 2
    return h * mpmath.fsum(wt * f(c + h * x) for x, wt in nodes)


def adaptive_gl(f, a, b, rel_tol, degree: int = BASE_DEGREE, budget: int = NODE_BUDGET, panels: int = 2):
    """Adaptive composite Gauss-Legendre with an n-vs-2n panel error estimate.

    For an analytic integrand the error of the n-point rule decays like
    rho^(-2n), so the 2n-point panel is accurate to about the square of the
    observed difference (relative to the panel scale).  A panel is accepted
    once that squared estimate is below its share of ``rel_tol``.
    """
    prec = mpmath.mp.prec
    lo_nodes = _gl_nodes(degree, prec)
    hi_nodes = _gl_nodes(degree + 1, prec)
    edges = [a + (b - a) * k / panels for k in range(panels + 1)]
    stack = []
    for u, v in zip(edges[:-1], edges[1:]):
        stack.append((u, v, _panel(f, u, v, lo_nodes), _panel(f, u, v, hi_nodes)))
    used = panels * (len(lo_nodes) + len(hi_nodes))
    scale = abs(mpmath.fsum(item[3] for item in stack)) or mpmath.mpf(1)
    stack.reverse()
    pieces = []
    while stack:
        u, v, coarse, fine = stack.pop()
        share = max((v - u) / (b - a), mpmath.mpf(1) / 1024)
        diff = abs(fine - coarse) / scale
        if diff <= mpmath.sqrt(rel_tol * share) / 16 or v - u < (b - a) * mpmath.ldexp(1, -40):
            pieces.append((u, fine))
            continue
        used += 2 * (len(lo_nodes) + len(hi_nodes))
        if used > budget:
            raise QuadratureError(f"node budget {budget} exceeded")
        mid = (u + v) / 2
        for lo_e, hi_e in ((mid, v), (u, mid)):
            stack.append((lo_e, hi_e, _panel(f, lo_e, hi_e, lo_nodes), _panel(f, lo_e, hi_e, hi_nodes)))
    pieces.sort(key=lambda p: p[0])
    return mpmath.fsum(p[1] for p in pieces), used


def integral_I(sd: SaddleData, node_factor: int = 1, cutoff_factor=1):
    """I(lambda) = int exp(-lambda F(T)) U'(T) dT over (-1/3, inf).

    Both tails are cut where lambda F(T) exceeds cutoff_factor * (prec ln 2 + 64);
    F grows like (3T+1)^(-3/2) on the left and T^(7/2) on the right, so
    the discarded mass is far below the working precision.
    """
    lam = sd.lam
    if not lam > 0:
        raise RangeError("lambda must be positive")
    prec = mpmath.mp.prec
    degree = BASE_DEGREE + max(0, int(node_factor).bit_length() - 1)
    cut = cutoff_factor * (prec * mpmath.ln2 + 64)
    target = cut / lam
    with mpmath.workprec(prec + 20):
        tol = mpmath.ldexp(1, -prec)
        t_right = _solve_increasing(lambda T: F_of_T(T), target, mpmath.mpf(0))
        w_left = _solve_increasing(_left_F, target, mpmath.mpf(1))
        right, _ = adaptive_gl(lambda T: _right_integrand(lam, T), mpmath.mpf(0), t_right, tol, degree)
        left, _ = adaptive_gl(lambda w: _left_integrand(lam, w), mpmath.mpf(1), w_left, tol, degree)
        total = left + right
    return +total


# -- assembled approximation -----------------------------------------------

@dataclass(frozen=True)
class AsymptoticValue:
    value: object
    regime: Regime
    errorIndicator: float
    saddle: SaddleData | None = None
    I: object = None


def E_d(d: int, t):
    """(1+t)^d / (1-t)^(d+1) through principal logs."""
    return mpmath.exp(d * mpmath.log(1 + t) - (d + 1) * mpmath.log(1 - t))


def near_zero_F(d: int, x):
    return sin_pi(x) / mpmath.pi * pow_principal(2 * d + 1, -x) * gamma(x)


def saddle_F(d: int, x, sd: SaddleData | None = None, I=None):
    """Saddle form for Im x > 0; returns (value, SaddleData, I)."""
    x = mpmath.mpc(x)
    if sd is None:
        sd = saddle_point(d, x.imag)
    if I is None:
        I = integral_I(sd)
    val = 3 / (4 * mpmath.pi) * (sd.K2 / sd.K3) * E_d(d, sd.alpha) * pow_principal(sd.alpha, x) * I
    return val, sd, I


def _check_domain(d: int, x, eps):
    if d < 1:
        raise RangeError("need d >= 1")
    if not (eps <= x.real <= 1 - eps):
        raise RangeError(f"Re x = {mpmath.nstr(x.real, 6)} outside [{eps}, {1 - eps}]")
    if abs(x.imag) > upper_tau(d):
        raise RangeError(f"|Im x| = {mpmath.nstr(abs(x.imag), 8)} exceeds d - d^(1/6)")


def asymptotic_F(d: int, x, eps: float = DEFAULT_EPSILON) -> AsymptoticValue:
    """Leading-order approximation of G(x) (see module docstring)."""
    x = mpmath.mpc(x)
    _check_domain(d, x, eps)
    if abs(x.imag) <= regime_threshold(d):
        return AsymptoticValue(near_zero_F(d, x), Regime.NEAR_ZERO, 1.0 / (2 * d + 1))
    if x.imag < 0:
        got = asymptotic_F(d, mpmath.conj(x), eps)
        return AsymptoticValue(mpmath.conj(got.value), got.regime, got.errorIndicator, got.saddle, got.I)
    val, sd, I = saddle_F(d, x)
    return AsymptoticValue(val, Regime.SADDLE, float(x.imag) ** (-1.0 / 28), sd, I)


def evaluate_L(d: int, x, eps: float = DEFAULT_EPSILON):
    """Approximate L_d(-x) as F(x) + (-1)^d conj F(1 - conj x)."""
    x = mpmath.mpc(x)
    a = asymptotic_F(d, x, eps).value
    mirror = 1 - mpmath.conj(x)
    b = a if mirror == x else asymptotic_F(d, mirror, eps).value
    return a + (-1) ** d * mpmath.conj(b)
