"""Synchronous detection: error signal, detection phase, slope at line center."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .lineshapes import ADAPTIVE, HarmonicResponse, SeriesTruncation, detuning_slopes


@dataclass(frozen=True)
class DemodulationSettings:
    alpha: float = 0.0
    harmonic: int = 1

    def __post_init__(self):
        if not (0.0 <= self.alpha < math.pi):
            raise DomainError(f"alpha must lie in [0, pi), got {self.alpha!r}")
        if self.harmonic != 1:
            raise DomainError("only the first harmonic is supported")


@dataclass(frozen=True)
class SlopeResult:
    slope: float
    alpha_opt: float
    components: tuple


def error_signal(r: HarmonicResponse, d: DemodulationSettings) -> float:
    """Lock-in output ``in_phase * cos(alpha) - quadrature * sin(alpha)``."""
    return r.in_phase * math.cos(d.alpha) - r.quadrature * math.sin(d.alpha)


def optimal_alpha(components):
    """Phase in [0, pi) maximizing |c_in cos(a) - c_q sin(a)|, and the maximum.

    On an exact tie at the interval edge the smaller phase (0) is returned.
    """
    c_in, c_q = (float(c) for c in components)
    slope = math.hypot(c_in, c_q)
    if slope == 0.0:
        raise DomainError("both slope components are zero; no optimal phase")
    alpha = math.atan2(-c_q, c_in) % math.pi
    if alpha >= math.pi:  # fmod rounding can land exactly on pi
        alpha = 0.0
    return alpha, slope


def slope_components(p, t: SeriesTruncation = ADAPTIVE):
    """(d in_phase/d detuning, d quadrature/d detuning) at zero detuning.

    The detuning field of ``p`` is ignored.
    """
    di, dq = detuning_slopes(p.model, p.omega_m_bar, [p.m], p.scale, t)
    return float(di[0]), float(dq[0])


def slope_at_center(p, d: DemodulationSettings, t: SeriesTruncation = ADAPTIVE) -> float:
    """d(error_signal)/d(detuning) at zero detuning, by term-wise differentiation."""
    di, dq = slope_components(p, t)
    return di * math.cos(d.alpha) - dq * math.sin(d.alpha)


def center_slope(p, t: SeriesTruncation = ADAPTIVE) -> SlopeResult:
    """Absolute slope at the best detection phase."""
    comps = slope_components(p, t)
    if comps == (0.0, 0.0):
        return SlopeResult(0.0, 0.0, comps)
    alpha, slope = optimal_alpha(comps)
    return SlopeResult(slope, alpha, comps)


def max_slope(di, dq):
    """Elementwise optimal-phase slope for arrays of components."""
    return np.hypot(di, dq)
