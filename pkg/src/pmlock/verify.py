"""Spectral-series vs time-domain comparison suite."""
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .lineshapes import ADAPTIVE, first_harmonic, make_params
from .oracle import DEFAULT_SETTINGS, OdeSettings, integrate

PERTURBATIVE_SCALE = 1e-4
DEFAULT_THRESHOLD = 1e-5
DEFAULT_GAMMA_G_RATIO = 1e-6

# (model, detuning, omega_m_bar, m); four per model
DEFAULT_POINTS = (
    ("cpt", 0.1, 0.764, 0.652),
    ("cpt", -0.4, 0.2, 2.0),
    ("cpt", 0.3, 3.0, 0.54),
    ("cpt", 1.5, 10.0, 1.2),
    ("two-level", 0.3, 5.0, 1.0),
    ("two-level", -0.5, 0.5, 1.5),
    ("two-level", 0.2, 0.1, 4.0),
    ("two-level", 1.0, 20.0, 0.8),
    ("dr", 0.3, 1.0, 1.0),
    ("dr", -0.4, 0.3, 2.0),
    ("dr", 0.2, 5.0, 0.6),
    ("dr", 0.7, 0.1, 3.0),
)


@dataclass(frozen=True)
class VerifyRow:
    model: str
    detuning: float
    omega_m_bar: float
    m: float
    scale: float
    spectral_in_phase: float
    spectral_quadrature: float
    oracle_in_phase: float
    oracle_quadrature: float
    rel_error: float
    passed: bool
    reason: str = ""


def relative_error(spectral, oracle, floor=1e-300):
    """|oracle - spectral| / |spectral| for the (in_phase, quadrature) vector.

    Both vectors at or below ``floor`` count as exact agreement.
    """
    a = np.asarray(spectral, dtype=float)
    b = np.asarray(oracle, dtype=float)
    na = float(np.hypot(*a))
    if na <= floor and float(np.hypot(*b)) <= floor:
        return 0.0
    if na == 0.0:
        return math.inf
    return float(np.hypot(*(a - b)) / na)


def compare(model, detuning, omega_m_bar, m, scale=PERTURBATIVE_SCALE, threshold=DEFAULT_THRESHOLD,
            settings: OdeSettings = DEFAULT_SETTINGS, gamma_g_ratio=DEFAULT_GAMMA_G_RATIO,
            t=ADAPTIVE) -> VerifyRow:
    scale = 1.0 if model == "cpt" else scale
    p = make_params(model, detuning, omega_m_bar, m, scale)
    series = first_harmonic(p, t)
    kw = {"gamma_g_ratio": gamma_g_ratio} if model == "dr" else {}
    orc = integrate(p, settings, **kw)
    floor = 1e-12 * scale
    err = relative_error(tuple(series), (orc.in_phase, orc.quadrature), floor)
    reason = ""
    if not orc.settled:
        reason = "oracle did not settle"
    elif not math.isfinite(err):
        reason = "non-finite comparison"
    elif err > threshold:
        reason = "above threshold"
    return VerifyRow(model, detuning, omega_m_bar, m, scale, series.in_phase, series.quadrature,
                     orc.in_phase, orc.quadrature, err, reason == "", reason)


def run_suite(points=DEFAULT_POINTS, scale=PERTURBATIVE_SCALE, threshold=DEFAULT_THRESHOLD,
              settings: OdeSettings = DEFAULT_SETTINGS, gamma_g_ratio=DEFAULT_GAMMA_G_RATIO,
              models: Optional[List[str]] = None) -> List[VerifyRow]:
    rows = []
    for model, d, w, m in points:
        if models and model not in models:
            continue
        rows.append(compare(model, d, w, m, scale, threshold, settings, gamma_g_ratio))
    return rows
