import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from crosspoly.exactpoly import build_ehrhart, eval_exact
from crosspoly.saddle import (
    QuadratureError,
    RangeError,
    Regime,
    SaddleData,
    U_and_derivative,
    F_of_T,
    K_closed_form,
    K_from_C,
    adaptive_gl,
    asymptotic_F,
    evaluate_L,
    integral_I,
    near_zero_F,
    saddle_F,
    saddle_point,
)


@pytest.fixture(autouse=True)
def _prec128():
    mpmath.mp.prec = 128


def rel(a, b):
    return abs(a - b) / abs(b)


def exact_L(d, x):
    return eval_exact(build_ehrhart(d), -mpmath.mpc(x), 128)


# -- the exact split the asymptotics approximate ---------------------------------

def G_integral(d, x):
    """(sin pi x / pi) int_0^1 E_d(-t) t^(x-1) dt, 0 < Re x < 1."""
    f = lambda t: (1 - t) ** d / (1 + t) ** (d + 1) * t ** (x - 1)
    return mpmath.sinpi(x) / mpmath.pi * mpmath.quad(f, [0, 1e-6, 1e-3, 0.1, 1])


@pytest.mark.parametrize("d,x", [(6, mpmath.mpc(0.5, 1.7)), (7, mpmath.mpc(0.3, 2.0)), (12, mpmath.mpc(0.6, -4))])
def test_exact_split_identity(d, x):
    # the t^(x-1) endpoint limits the library quadrature to about nine digits
    with mpmath.workprec(80):
        a = G_integral(d, x)
        b = (-1) ** d * mpmath.conj(G_integral(d, 1 - mpmath.conj(x)))
        lhs = exact_L(d, x)
        assert abs(a + b - lhs) < 1e-7 * (abs(a) + abs(b))


# -- saddle point --------------------------------------------------------------------

def test_saddle_examples():
    sd = saddle_point(100, 50)
    assert abs(sd.K2 - mpmath.sqrt(3) / 2) < 1e-30
    assert abs(sd.alpha - mpmath.mpc(0, -(2 - mpmath.sqrt(3)))) < 1e-30
    edge = saddle_point(100, 100, strict=False)
    assert edge.alpha == mpmath.mpc(0, -1)
    assert edge.K2 == 0


def test_saddle_range_errors():
    with pytest.raises(RangeError):
        saddle_point(100, 0)
    with pytest.raises(RangeError):
        saddle_point(100, 99)
    with pytest.raises(RangeError):
        saddle_point(100, 101, strict=False)


def test_saddle_invariants_random():
    rng = random.Random(5)
    for _ in range(1000):
        d = rng.randint(2, 3000)
        tau = rng.uniform(1e-3, d - d ** (1 / 6))
        sd = saddle_point(d, tau)
        a = sd.alpha
        assert a.real == 0 and -1 < a.imag < 0
        a_plus = mpmath.mpc(0, -(d / sd.tau + mpmath.sqrt(d ** 2 / sd.tau ** 2 - 1)))
        assert abs(a * a_plus + 1) < 1e-25
        assert abs(2 * d * a + 1j * sd.tau * (1 - a * a)) < mpmath.mpf(2) ** (32 - 128) * d
        assert abs(sd.K2 - mpmath.sqrt(1 - sd.tau ** 2 / d ** 2)) < 1e-25
        for m in (2, 3, 4):
            assert 0 < sd.K[m] < 2
        for m in (3, 4):
            assert sd.K[m] >= 1 - 1 / mpmath.sqrt(2)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5000), st.floats(0.001, 0.999))
def test_K_two_derivations_agree(d, frac):
    tau = frac * (d - d ** (1 / 6))
    if tau <= 0:
        return
    sd = saddle_point(d, tau)
    for m in (2, 3, 4):
        a = K_from_C(d, sd.tau, sd.alpha, m)
        b = K_closed_form(d, sd.tau, sd.alpha, m)
        assert abs(a - b) < 1e-20 * max(1, abs(b))
        assert abs(b.imag) < 1e-20


def test_lambda_uses_cubic_phase_constant():
    sd = saddle_point(400, 200)
    assert abs(sd.lam - mpmath.mpf(9) / 8 * sd.tau * sd.K2 ** 3 / sd.K3 ** 2) < 1e-25


# -- profile functions --------------------------------------------------------------

def test_F_examples():
    assert F_of_T(0) == 0
    assert abs(F_of_T(1) - 9 * mpmath.sqrt(2) / 4) < 1e-30
    # 2 (1/16) (1/4) sqrt(3/4) / (1/4)^(3/2) = sqrt(3)/8
    expected = mpmath.sqrt(3) / 8
    assert abs(F_of_T(-0.25) - expected) < 1e-30
    with pytest.raises(RangeError):
        F_of_T(-1 / 3 - 1e-9)


def test_F_monotone_on_grid():
    pts = [mpmath.mpf(-1) / 3 + k * mpmath.mpf(1) / 3000 for k in range(1, 1000)]
    pts += [mpmath.mpf(k) / 100 for k in range(1, 1000)]
    h = mpmath.mpf(10) ** -20
    for t in pts:
        deriv = (F_of_T(t + h) - F_of_T(t - h)) / (2 * h)
        if t < 0:
            assert deriv < 0
        else:
            assert deriv > 0


def test_U_examples():
    U, dU = U_and_derivative(0)
    assert U == 0 and dU == mpmath.mpc(1, 1)
    U, _ = U_and_derivative(1)
    assert abs(U - mpmath.mpc(mpmath.sqrt(0.5), 1)) < 1e-30
    for T in (-0.3, 0.5, 10):
        _, dU = U_and_derivative(T)
        assert dU.imag == 1 and dU.real >= 1 / mpmath.sqrt(3)
    with pytest.raises(RangeError):
        U_and_derivative(-0.4)


@settings(max_examples=80, deadline=None)
@given(st.floats(-0.3333, 50))
def test_U_properties(T):
    T = mpmath.mpf(T)
    if T <= -mpmath.mpf(1) / 3:
        return
    U, dU = U_and_derivative(T)
    assert abs(abs(U) - abs(T) * mpmath.sqrt(2 * (2 * T + 1) / (3 * T + 1))) < 1e-25 * (1 + abs(U))
    # derivative against a central difference
    h = mpmath.mpf(10) ** -15
    if T - h > -mpmath.mpf(1) / 3:
        num = (U_and_derivative(T + h)[0] - U_and_derivative(T - h)[0]) / (2 * h)
        assert abs(num - dU) < 1e-10 * abs(dU)
    assert dU.real >= 1 / mpmath.sqrt(3) - 1e-30


# -- quadrature --------------------------------------------------------------

def test_integral_argument_bound():
    for tau in (20, 50, 90):
        I = integral_I(saddle_point(100, tau))
        assert 0 < mpmath.arg(I) < mpmath.pi / 3


def test_integral_gaussian_limit():
    for lam in (10 ** 4, 10 ** 6):
        sd = SaddleData(10, mpmath.mpf(1), mpmath.mpc(0, -0.1), {2: 1, 3: 1, 4: 1}, mpmath.mpf(lam))
        I = integral_I(sd)
        ref = mpmath.mpc(1, 1) * mpmath.sqrt(mpmath.pi / (2 * lam))
        assert rel(I, ref) < 0.05


def test_integral_against_library_quadrature():
    sd = saddle_point(100, 50)
    lam = sd.lam
    f = lambda T: mpmath.exp(-lam * F_of_T(T)) * U_and_derivative(T)[1]
    with mpmath.workprec(128):
        # tanh-sinh on a split interval, away from the tiny left tail
        ref = mpmath.quad(f, [mpmath.mpf(-1) / 3 + mpmath.mpf(10) ** -3, -0.2, -0.1, 0, 0.1, 0.3, 1, 3])
    assert rel(integral_I(sd), ref) < 1e-25


def test_integral_node_doubling():
    sd = saddle_point(100, 50)
    a = integral_I(sd)
    assert rel(integral_I(sd, node_factor=2), a) < 1e-12
    assert rel(integral_I(sd, cutoff_factor=2), a) < 1e-12


def test_integral_rejects_nonpositive_lambda():
    with pytest.raises(RangeError):
        integral_I(saddle_point(100, 100, strict=False))


def test_adaptive_gl_budget():
    with pytest.raises(QuadratureError):
        adaptive_gl(lambda t: mpmath.sin(1 / (t + mpmath.mpf(10) ** -30)), mpmath.mpf(0), mpmath.mpf(1),
                    mpmath.mpf(2) ** -100, budget=2000)


def test_adaptive_gl_polynomial_exact():
    val, _ = adaptive_gl(lambda t: 5 * t ** 4, mpmath.mpf(0), mpmath.mpf(2), mpmath.mpf(2) ** -120)
    assert abs(val - 32) < 1e-30


def test_quadrature_convergence_order():
    # composite Gauss-Legendre on one panel: doubling the node count squares the error
    from crosspoly.saddle import _gl_nodes, _panel, _right_integrand
    sd = saddle_point(60, 30)
    ref = _panel(lambda T: _right_integrand(sd.lam, T), mpmath.mpf(0), mpmath.mpf(1), _gl_nodes(7, 128))
    errs = []
    for deg in (2, 3, 4):
        v = _panel(lambda T: _right_integrand(sd.lam, T), mpmath.mpf(0), mpmath.mpf(1), _gl_nodes(deg, 128))
        errs.append(abs(v - ref))
    assert errs[1] < errs[0] ** 1.5 and errs[2] < errs[1] ** 1.5


# -- assembled formula ---------------------------------------------------------

def test_near_zero_example():
    d = 10 ** 6
    av = asymptotic_F(d, 0.5)
    assert av.regime is Regime.NEAR_ZERO
    assert rel(av.value, (2 * d + 1) ** mpmath.mpf(-0.5) / mpmath.sqrt(mpmath.pi)) < 1e-30


def test_saddle_example_vs_exact():
    x = mpmath.mpc(0.5, 20)
    av = asymptotic_F(50, x)
    assert av.regime is Regime.SADDLE
    assert rel(evaluate_L(50, x), exact_L(50, x)) <= 0.5


def test_regime_overlap():
    d = 10 ** 4
    x = mpmath.mpc(0.5, mpmath.sqrt(mpmath.log(d)))
    sad = saddle_F(d, x)[0]
    near = near_zero_F(d, x)
    assert abs(sad - near) / abs(near) <= 0.5


def test_regime_boundary():
    d = 1000
    t = mpmath.sqrt(mpmath.log(d))
    assert asymptotic_F(d, mpmath.mpc(0.5, t * 0.999)).regime is Regime.NEAR_ZERO
    assert asymptotic_F(d, mpmath.mpc(0.5, t * 1.001)).regime is Regime.SADDLE


def test_conjugate_symmetry():
    for tau in (0.5, 30):
        a = asymptotic_F(80, mpmath.mpc(0.4, tau)).value
        b = asymptotic_F(80, mpmath.mpc(0.4, -tau)).value
        assert abs(a - mpmath.conj(b)) < 1e-25 * abs(a)


def test_domain_errors():
    with pytest.raises(RangeError):
        asymptotic_F(100, mpmath.mpc(0.01, 10))
    with pytest.raises(RangeError):
        asymptotic_F(100, mpmath.mpc(0.5, 99.5))
    with pytest.raises(RangeError):
        asymptotic_F(100, mpmath.mpc(0.5, 10), eps=0.6)


def test_critical_line_values_have_exact_parity():
    # on Re x = 1/2 the two terms are conjugate mirrors: 2 Re F for d even, 2i Im F for d odd
    for d, tau in ((40, 10), (41, 10), (40, 20), (41, 5)):
        v = evaluate_L(d, mpmath.mpc(0.5, tau))
        if d % 2 == 0:
            assert v.imag == 0
        else:
            assert v.real == 0


@pytest.mark.parametrize("tau", [30, 60, 100, 150])
def test_accuracy_d200(tau):
    x = mpmath.mpc(0.5, tau)
    assert rel(evaluate_L(200, x), exact_L(200, x)) <= 0.5


@pytest.mark.parametrize("d,x", [(60, mpmath.mpc(0.3, 25)), (61, mpmath.mpc(0.7, -40)), (90, mpmath.mpc(0.2, 70))])
def test_accuracy_off_critical_line(d, x):
    assert rel(evaluate_L(d, x), exact_L(d, x)) <= 0.5
