import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jv

from pmlock.errors import DomainError
from pmlock.special import _rows_numba, _rows_numpy, bessel_j, bessel_row, bessel_rows


def test_trivial_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(-3, 2.5) == -bessel_j(3, 2.5)
    assert np.array_equal(bessel_row(0.0, 5).values, [1, 0, 0, 0, 0, 0])


@pytest.mark.parametrize("x", [1e-3, 0.3, 1.304, 5.0, 17.5, 42.0, 99.9])
def test_matches_scipy_small_arguments(x):
    k = np.arange(0, int(x) + 80)
    ours = bessel_rows([x], k[-1])[0]
    ref = jv(k, x)
    # relative 1e-12 away from zeros of J_k; absolute floor near them
    assert np.all(np.abs(ours - ref) <= 1e-12 * np.maximum(np.abs(ref), 1e-2))


@pytest.mark.parametrize("x", [150.0, 700.0, 2400.0, 2.5e4])
def test_matches_scipy_large_arguments(x):
    k = np.arange(0, int(x) + 100, 7)
    ours = bessel_rows([x], k[-1])[0][k]
    ref = jv(k, x)
    assert np.all(np.abs(ours - ref) <= 1e-10 * np.maximum(np.abs(ref), 1e-2))


def test_negative_argument():
    row = bessel_rows([-3.7], 12)[0]
    ref = jv(np.arange(13), -3.7)
    np.testing.assert_allclose(row, ref, rtol=1e-13, atol=1e-16)


def test_product_j0_j1_peak():
    # scan with the scipy reference: max of J0(x) J1(x) near x = 1.08 -> m = 0.54 for CPT
    xs = np.arange(1e-4, 2.0, 1e-4)
    prod = jv(0, xs) * jv(1, xs)
    x_star = xs[np.argmax(prod)]
    assert x_star == pytest.approx(1.08, abs=5e-3)
    assert bessel_j(0, 1.08) * bessel_j(1, 1.08) == pytest.approx(prod.max(), rel=1e-4)


def test_row_matches_pointwise():
    row = bessel_row(1.304, 64)
    pointwise = np.array([bessel_j(k, 1.304) for k in range(65)])
    assert np.all(np.abs(row.values - pointwise) <= 1e-12 * np.maximum(np.abs(pointwise), 1e-300))


def test_table_negative_index():
    row = bessel_row(2.0, 6)
    assert row[-3] == -row[3]
    assert row[-4] == row[4]
    assert row.k_max == 6


@pytest.mark.parametrize("x", [0.0, 0.7, 3.0, 30.0, 200.0, 1500.0])
def test_normalization_identity(x):
    k_max = int(x + 40 * max(x, 1) ** (1 / 3) + 40)
    assert bessel_row(x, k_max).normalization_sum() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(0, 50), x=st.floats(1e-3, 200.0))
def test_parity_exact(k, x):
    assert bessel_j(-k, x) == (-1) ** k * bessel_j(k, x)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.1, 300.0), k_max=st.integers(2, 120))
def test_recurrence_residual(x, k_max):
    j = bessel_rows([x], k_max)[0]
    k = np.arange(1, k_max)
    res = j[k - 1] + j[k + 1] - 2 * k / x * j[k]
    assert np.all(np.abs(res) <= 1e-10 * np.maximum(1.0, np.abs(j[k])))


@settings(max_examples=40, deadline=None)
@given(xs=st.lists(st.floats(0.0, 400.0), min_size=1, max_size=6))
def test_bounded_and_finite(xs):
    rows = bessel_rows(xs, 80)
    assert np.all(np.isfinite(rows))
    assert np.all(np.abs(rows) <= 1.0 + 1e-14)


def test_backends_agree():
    xs = np.array([0.0, 1e-6, 0.4, 3.3, 25.0, 140.0, 900.0])
    a = _rows_numba(xs, 200)
    b = _rows_numpy(xs, 200)
    assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(np.abs(a), 1e-12))


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf, 2e6])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        bessel_j(0, bad)


def test_negative_kmax():
    with pytest.raises(DomainError):
        bessel_row(1.0, -1)
