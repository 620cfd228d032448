from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polygasket.chebyshev import EXACT_DEGREE_LIMIT, coefficients, eval_first_kind as T, eval_second_kind as U


def test_small_values():
    assert T(0, 0.37) == 1.0
    assert T(1, -0.5) == -0.5
    assert T(4, 0.3) == pytest.approx(8 * 0.3**4 - 8 * 0.3**2 + 1, abs=1e-15)
    assert U(0, 0.9) == 1.0
    assert U(1, 0.25) == 0.5
    assert U(3, 0.5) == pytest.approx(-1.0, abs=1e-15)
    assert U(-1, 0.3) == 0.0


def test_endpoints_without_special_cases():
    for k in range(8):
        assert U(k, 1.0) == k + 1
        assert U(k, -1.0) == (k + 1) * (-1) ** k


def test_arrays_and_scalars_agree():
    x = np.linspace(-2, 2, 11)
    for k in (0, 1, 5):
        np.testing.assert_allclose(T(k, x), [T(k, float(v)) for v in x], rtol=1e-14)
        np.testing.assert_allclose(U(k, x), [U(k, float(v)) for v in x], rtol=1e-14)


@given(st.integers(0, 30), st.floats(0, math.pi))
def test_trig_form_on_the_interval(k, t):
    x = math.cos(t)
    assert T(k, x) == pytest.approx(math.cos(k * t), abs=1e-9)
    if abs(math.sin(t)) > 1e-3:
        assert U(k, x) == pytest.approx(math.sin((k + 1) * t) / math.sin(t), abs=1e-8 * (k + 1) ** 2)


@given(st.integers(1, 20), st.floats(-2, 2))
def test_pell_identity(k, x):
    t = T(k, x)
    lhs = t**2 - (x * x - 1) * U(k - 1, x) ** 2
    # for |x| > 1 both squares grow like (x + sqrt(x^2-1))^(2k) and cancel
    assert abs(lhs - 1.0) <= 1e-9 + 64 * np.finfo(float).eps * t * t


@pytest.mark.parametrize("N", [1, 2, 3, 5, 8])
def test_derivative_identity(N):
    h = 1e-6
    for x in np.linspace(-0.95, 0.95, 13):
        fd = (T(N, x + h) - T(N, x - h)) / (2 * h)
        assert fd == pytest.approx(N * U(N - 1, x), abs=1e-5 * max(1.0, N**2))


@pytest.mark.parametrize("N", [2, 3, 4, 7])
def test_extrema_at_zeros_of_u(N):
    for j in range(1, N):
        x = math.cos(j * math.pi / N)
        assert abs(U(N - 1, x)) < 1e-9
        assert abs(T(N, x)) == pytest.approx(1.0, abs=1e-9)


def test_coefficient_examples():
    assert coefficients("first", 2).coeffs == (-1, 0, 2)
    assert coefficients("second", 2).coeffs == (-1, 0, 4)
    assert coefficients("first", 0).coeffs == (1,)


@settings(max_examples=25)
@given(st.sampled_from(["first", "second"]), st.integers(0, 20))
def test_coefficients_match_recurrence(kind, k):
    poly = coefficients(kind, k)
    assert all(isinstance(c, int) for c in poly.coeffs)
    x = np.random.default_rng(k).uniform(-1, 1, 100)
    ref = T(k, x) if kind == "first" else U(k, x)
    np.testing.assert_allclose(poly(x), ref, atol=1e-10)


def test_high_degree_warns_and_goes_float():
    with pytest.warns(UserWarning):
        poly = coefficients("first", EXACT_DEGREE_LIMIT + 1)
    assert isinstance(poly.coeffs[-1], float)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        coefficients("first", EXACT_DEGREE_LIMIT)


def test_bad_arguments():
    with pytest.raises(ValueError):
        coefficients("third", 2)
    with pytest.raises(ValueError):
        T(-1, 0.0)
    with pytest.raises(ValueError):
        U(-2, 0.0)
