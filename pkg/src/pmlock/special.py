"""Bessel functions of the first kind for integer order.

Rows J_0(x) .. J_kmax(x) come from Miller's downward recurrence, normalized
with J_0 + 2 * sum_j J_2j = 1. Negative orders and arguments use
J_{-k}(x) = J_k(-x) = (-1)^k J_k(x).
"""
import math
from dataclasses import dataclass

import numpy as np

from ._backend import njit, select
from .errors import DomainError

X_LIMIT = 1e6
_BIG = 1e200
_SMALL = 1e-200
# below this the recurrence can overflow within one step; the two-term power
# series is exact to double precision there
_TINY = 1e-5


def _start_order(k_max, x):
    return k_max + int(math.ceil(1.5 * x)) + 20


def _small_series(row, x, k_max):
    half = 0.5 * x
    q = half * half
    term = 1.0
    for k in range(k_max + 1):
        if k > 0:
            term *= half / k
        row[k] = term * (1.0 - q / (k + 1))


def _rows_loop(xs, k_max):
    n = xs.shape[0]
    out = np.zeros((n, k_max + 1))
    for i in range(n):
        x = xs[i]
        if x < _TINY:
            _small_series(out[i], x, k_max)
            continue
        k_start = k_max + int(math.ceil(1.5 * x)) + 20
        two_over_x = 2.0 / x
        jp = 0.0
        j = 1.0
        total = 0.0
        for k in range(k_start, 0, -1):
            if k <= k_max:
                out[i, k] = j
            if k % 2 == 0:
                total += 2.0 * j
            jm = k * two_over_x * j - jp
            jp = j
            j = jm
            if abs(j) > _BIG:
                j *= _SMALL
                jp *= _SMALL
                total *= _SMALL
                for q in range(k, k_max + 1):
                    out[i, q] *= _SMALL
        out[i, 0] = j
        total += j
        for q in range(k_max + 1):
            out[i, q] /= total
    return out


def _rows_numpy(xs, k_max):
    # One recurrence for all arguments; the shared start order is the largest
    # any argument needs, which only adds accuracy for the smaller ones.
    xs = np.asarray(xs, dtype=float)
    n = xs.shape[0]
    out = np.zeros((n, k_max + 1))
    if n == 0:
        return out
    tiny = xs < _TINY
    x = np.where(tiny, 1.0, xs)
    k_start = _start_order(k_max, float(x.max()))
    two_over_x = 2.0 / x
    jp = np.zeros(n)
    j = np.ones(n)
    total = np.zeros(n)
    for k in range(k_start, 0, -1):
        if k <= k_max:
            out[:, k] = j
        if k % 2 == 0:
            total += 2.0 * j
        jm = k * two_over_x * j - jp
        jp = j
        j = jm
        big = np.abs(j) > _BIG
        if big.any():
            f = np.where(big, _SMALL, 1.0)
            j = j * f
            jp = jp * f
            total *= f
            if k <= k_max:
                out[:, k:] *= f[:, None]
    out[:, 0] = j
    total += j
    out /= total[:, None]
    for i in np.flatnonzero(tiny):
        _small_series_py(out[i], xs[i], k_max)
    return out


_small_series_py = _small_series
_small_series = njit(_small_series)
_rows_numba = njit(_rows_loop)
_rows_kernel = select(_rows_numba, _rows_numpy)


def _check_argument(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    if np.any(np.abs(x) >= X_LIMIT):
        raise DomainError(f"|x| must be below {X_LIMIT:g}")
    return x


def bessel_rows(xs, k_max):
    """J_k(x) for k = 0..k_max, one row per argument in ``xs``."""
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    xs = np.atleast_1d(_check_argument(xs)).astype(float)
    rows = _rows_kernel(np.ascontiguousarray(np.abs(xs)), int(k_max))
    neg = xs < 0
    if neg.any():
        rows[np.ix_(neg, np.arange(1, k_max + 1, 2))] *= -1.0
    return rows


@dataclass(frozen=True)
class BesselTable:
    argument: float
    values: np.ndarray

    @property
    def k_max(self):
        return self.values.shape[0] - 1

    def __getitem__(self, k):
        v = self.values[abs(k)]
        return -v if (k < 0 and k % 2) else v

    def normalization_sum(self):
        return self.values[0] + 2.0 * self.values[2::2].sum()


def bessel_row(x, k_max):
    """Table of J_0(x) .. J_kmax(x)."""
    return BesselTable(float(x), bessel_rows([x], k_max)[0])


def bessel_j(k, x):
    """J_k(x) for any integer k."""
    k = int(k)
    x = float(_check_argument(x))
    v = bessel_rows([x], abs(k))[0, abs(k)]
    if k < 0 and k % 2:
        v = -v
    return float(v)
