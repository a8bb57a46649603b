"""Slope maximization over the modulation index and sweeps over modulation frequency."""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainError
from .lineshapes import ADAPTIVE, SeriesTruncation, canonical_model, detuning_slopes, low_freq_slopes
from .lockin import optimal_alpha

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
GRID_POINTS = 400
M_TOL = 1e-5


def golden_max(f, a, b, tol=M_TOL):
    """Golden-section search for a maximum of f on [a, b]; returns (x, f(x))."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def default_m_range(omega_m_bar):
    """(0, 60] for w >= 0.05, else (0, 12/w]: the optimum follows m ~ 1/w there."""
    if omega_m_bar >= 0.05:
        return (0.0, 60.0)
    return (0.0, 12.0 / omega_m_bar)


@dataclass(frozen=True)
class OptimumPoint:
    omega_m_bar: float
    m_opt: float
    alpha_opt: float
    slope_max: float


@dataclass(frozen=True)
class SweepTable:
    rows: Tuple[OptimumPoint, ...]
    normalization: float
    model: str = "cpt"
    m_range_policy: str = "default"

    @property
    def omega(self):
        return np.array([r.omega_m_bar for r in self.rows])

    @property
    def m_opt(self):
        return np.array([r.m_opt for r in self.rows])

    @property
    def alpha_opt(self):
        return np.array([r.alpha_opt for r in self.rows])

    @property
    def slope(self):
        return np.array([r.slope_max for r in self.rows])

    @property
    def slope_norm(self):
        return self.slope / self.normalization

    def peak(self):
        return self.rows[int(np.argmax(self.slope))]


def _slope_fn(model, omega, scale, t, form):
    if form == "series":
        def batch(ms):
            di, dq = detuning_slopes(model, omega, ms, scale, t)
            return np.hypot(di, dq)
    elif form == "low_freq":
        def batch(ms):
            return low_freq_slopes(model, omega, ms, scale, t)
    else:
        raise DomainError(f"unknown slope form {form!r}")
    return batch


def _alpha(model, omega, m, scale, t, form):
    if form == "low_freq":
        # in-phase only, negative for positive detuning slope sign -> alpha = 0 branch
        return 0.0
    di, dq = detuning_slopes(model, omega, [m], scale, t)
    if di[0] == 0.0 and dq[0] == 0.0:
        return 0.0
    return optimal_alpha((di[0], dq[0]))[0]


def maximize_slope(model, omega_m_bar, t: SeriesTruncation = ADAPTIVE,
                   m_range: Optional[Tuple[float, float]] = None, scale=1.0,
                   grid_points=GRID_POINTS, tol=M_TOL, form="series") -> OptimumPoint:
    """Best modulation index at fixed modulation frequency.

    The detection phase is eliminated in closed form, so the objective is
    sqrt(c_in^2 + c_q^2). A coarse grid picks the global basin (the slope has
    several local maxima in m), golden-section search refines inside it.
    """
    model = canonical_model(model)
    if not (math.isfinite(omega_m_bar) and omega_m_bar > 0):
        raise DomainError("omega_m_bar must be > 0")
    lo, hi = m_range if m_range is not None else default_m_range(omega_m_bar)
    if not (math.isfinite(lo) and math.isfinite(hi) and 0 <= lo < hi):
        raise DomainError(f"invalid m range ({lo!r}, {hi!r})")
    if grid_points < 200:
        raise DomainError("grid_points must be >= 200")

    batch = _slope_fn(model, omega_m_bar, scale, t, form)
    grid = np.linspace(lo, hi, grid_points)
    values = batch(grid)
    i = int(np.argmax(values))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid_points - 1)]
    m, s = golden_max(lambda x: float(batch([x])[0]), a, b, tol)
    if values[i] > s:
        m, s = float(grid[i]), float(values[i])
    alpha = _alpha(model, omega_m_bar, m, scale, t, form)
    return OptimumPoint(float(omega_m_bar), float(m), float(alpha), float(s))


def sweep_omega(model, omega_list, t: SeriesTruncation = ADAPTIVE, m_range=None, scale=1.0,
                grid_points=GRID_POINTS, map_fn=map) -> SweepTable:
    """One optimum per modulation frequency, normalized to the table maximum.

    Points are independent; pass e.g. ``executor.map`` as ``map_fn`` to fan
    them out. Rows come back sorted by frequency whatever the completion order.
    """
    omegas = sorted(float(w) for w in omega_list)
    if not omegas:
        raise DomainError("omega_list is empty")
    if omegas[0] <= 0:
        raise DomainError("modulation frequencies must be > 0")
    model = canonical_model(model)
    rows = tuple(map_fn(lambda w: maximize_slope(model, w, t, m_range, scale, grid_points), omegas))
    norm = max(r.slope_max for r in rows)
    return SweepTable(rows, norm, model, "default" if m_range is None else f"{m_range[0]}:{m_range[1]}")


@dataclass(frozen=True)
class StationarityRow:
    omega_m_bar: float
    m_opt: float
    deviation: float
    slope: float


def stationarity_report(model, omega_list, t: SeriesTruncation = ADAPTIVE, scale=1.0,
                        form="series", grid_points=GRID_POINTS) -> List[StationarityRow]:
    """Optimal m, frequency deviation m*w and max slope in the slow-modulation regime.

    ``form="low_freq"`` maximizes the dominant in-phase term only instead of
    the full series.
    """
    omegas = [float(w) for w in omega_list]
    if not omegas or any(not (0 < w <= 0.1) for w in omegas):
        raise DomainError("stationarity analysis needs 0 < omega_m_bar <= 0.1")
    out = []
    for w in omegas:
        p = maximize_slope(model, w, t, None, scale, grid_points, form=form)
        out.append(StationarityRow(w, p.m_opt, p.m_opt * w, p.slope_max))
    return out


def pair_slope(shift):
    """Center slope of 1/((d - s)^2 + 1) - 1/((d + s)^2 + 1)."""
    return 4.0 * shift / (shift * shift + 1.0) ** 2


def lorentzian_pair_shift(tol=1e-10):
    """Shift of an opposite-sign Lorentzian pair that maximizes its center slope."""
    grid = np.linspace(0.0, 3.0, 301)
    i = int(np.argmax(pair_slope(grid)))
    s, _ = golden_max(pair_slope, grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)], tol)
    return s
