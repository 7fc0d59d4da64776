import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import loggamma as scipy_loggamma

from spectral_zeros.core import (
    EvaluationResult,
    PoleError,
    ZeroFactorSignal,
    log_gamma,
    result_from_log,
    stable_log_product,
)


# ---------------------------------------------------------------- log_gamma

def test_log_gamma_at_one_is_zero():
    assert abs(log_gamma(1.0)) < 1e-14


def test_log_gamma_at_five_is_log_24():
    assert abs(log_gamma(5.0) - math.log(24.0)) < 1e-14


def test_log_gamma_half_against_integral_oracle():
    # Gamma(1/2) = integral_0^inf t^(-1/2) e^(-t) dt, evaluated independently
    val, est_err = quad(lambda t: math.exp(-t) / math.sqrt(t), 0.0, np.inf)
    assert est_err < 1e-10
    assert abs(log_gamma(0.5) - math.log(val)) < 1e-10
    assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-14


def test_log_gamma_matches_scipy_to_12_digits_inside_radius_100():
    rng = np.random.default_rng(20240811)
    pts = rng.uniform(-100.0, 100.0, size=(2000, 2))
    for x, y in pts:
        z = complex(x, y)
        if x <= 0.5 and abs(y) < 1e-3:
            continue  # hug of the cut / pole line, excluded from the 12-digit claim
        ours = log_gamma(z)
        ref = complex(scipy_loggamma(z))
        assert abs(ours - ref) <= 1e-12 * max(1.0, abs(ref)), z


def test_log_gamma_principal_branch_between_negative_integers():
    # On (-3, -2) just off the axis, principal branch has |Im| ~ 3*pi
    ref = complex(scipy_loggamma(complex(-2.5, 0.0)))
    assert abs(log_gamma(complex(-2.5, 0.0)) - ref) < 1e-12 * abs(ref)


@pytest.mark.parametrize("n", [0, -1, -2, -17])
def test_log_gamma_pole_at_nonpositive_integers(n):
    with pytest.raises(PoleError) as exc:
        log_gamma(complex(n, 0.0))
    assert exc.value.nearest == n


def test_log_gamma_pole_detection_window():
    with pytest.raises(PoleError):
        log_gamma(complex(-3.0, 1e-13))
    # 1e-10 away is outside the pole window and must evaluate
    assert cmath.isfinite(log_gamma(complex(-3.0, 1e-10)))


@given(st.complex_numbers(min_magnitude=0.5, max_magnitude=50.0,
                          allow_nan=False, allow_infinity=False))
@settings(max_examples=200)
def test_log_gamma_recurrence(z):
    if z.real <= 0 and abs(z.imag) < 1e-3:
        return
    lhs = log_gamma(z + 1)
    rhs = log_gamma(z) + cmath.log(z)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


@given(st.floats(0.05, 0.95), st.floats(-20.0, 20.0))
@settings(max_examples=200)
def test_log_gamma_reflection_branch_matched(x, y):
    z = complex(x, y)
    lhs = log_gamma(z) + log_gamma(1 - z)
    rhs = cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z))
    d = lhs - rhs
    # identity holds modulo 2*pi*i; remove the integer winding, then compare
    residual = complex(d.real, d.imag - 2 * math.pi * round(d.imag / (2 * math.pi)))
    assert abs(residual) < 1e-10


# ------------------------------------------------------- stable_log_product

def test_product_of_small_integers():
    r = stable_log_product([2.0, 3.0, 4.0])
    assert abs(r.log_value - math.log(24.0)) < 1e-14
    assert abs(r.value - 24.0) < 1e-12
    assert r.terms_used == 3


def test_empty_product_is_one():
    r = stable_log_product([])
    assert r.value == 1
    assert r.log_value == 0
    assert r.terms_used == 0


def test_winding_product_unwinds_past_pi():
    # (1 + 1e-3 i)^(10^5): modulus (1+1e-6)^(5e4), argument 1e5*atan(1e-3) ~ 100 rad
    n = 10 ** 5
    r = stable_log_product([complex(1.0, 1e-3)] * n)
    assert abs(r.log_value.imag - n * math.atan2(1e-3, 1.0)) < 1e-9
    assert abs(r.log_value.real - 0.5 * n * math.log1p(1e-6)) < 1e-9
    assert r.log_value.imag > math.pi  # genuinely unwound


def test_zero_factor_signal_reports_index():
    with pytest.raises(ZeroFactorSignal) as exc:
        stable_log_product([1.0, 2.0, 0.0, 4.0])
    assert exc.value.index == 2


def test_nonfinite_factor_overflows():
    with pytest.raises(OverflowError):
        stable_log_product([1.0, complex(math.inf, 0.0)])


@given(st.lists(st.complex_numbers(max_magnitude=0.3, allow_nan=False,
                                   allow_infinity=False), max_size=30),
       st.randoms(use_true_random=False))
@settings(max_examples=200)
def test_product_log_is_permutation_invariant(perturbations, rnd):
    # absolutely convergent shape: factors 1 + a_k with |a_k| <= 0.3
    factors = [1.0 + a for a in perturbations]
    shuffled = list(factors)
    rnd.shuffle(shuffled)
    r1 = stable_log_product(factors)
    r2 = stable_log_product(shuffled)
    assert abs(r1.log_value - r2.log_value) < 1e-10


def test_error_estimate_scales_with_tail_hint():
    base = stable_log_product([2.0, 1.5]).error_estimate
    scaled = stable_log_product([2.0, 1.5], tail_hint=7.0).error_estimate
    assert abs(scaled - 7.0 * base) < 1e-15


# ------------------------------------------------------------------ results

def test_result_exp_log_consistency():
    r = stable_log_product([complex(1.1, 0.2)] * 50)
    assert abs(cmath.exp(r.log_value) - r.value) <= 1e-12 * abs(r.value)


def test_result_from_log_overflow_guard():
    r = result_from_log(complex(800.0, 1.0))
    assert r.value.real == math.inf
    assert r.log_value == complex(800.0, 1.0)


def test_result_rejects_negative_error_estimate():
    with pytest.raises(ValueError):
        EvaluationResult(value=1 + 0j, log_value=0j, error_estimate=-1.0, terms_used=0)
    with pytest.raises(ValueError):
        EvaluationResult(value=1 + 0j, log_value=0j, error_estimate=float("nan"), terms_used=0)
