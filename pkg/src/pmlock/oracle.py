"""Time-domain reference: integrate the density-matrix equations with explicit
phase modulation phi(t) = m sin(w t), then demodulate numerically.

Time is measured in inverse linewidth units of each model (1/Gt_g for CPT,
2/gamma for the two-level line, Gamma/V^2 for double resonance), so every
relaxation rate is O(1) and the dynamics are non-stiff.

Equations integrated (v = sqrt(scale), g = Gamma_g / (V^2/Gamma)):

    CPT        r'    = (i d - 1) r + exp(-2i phi)
               y     = Re[exp(2i phi) r]        (normalized transparency signal)
    two-level  p_ee' = 2 v Im[exp(-i phi) conj(p_eg)] - 2 p_ee
               p_eg' = (i d - 1) p_eg - i v exp(-i phi)
    DR         p_aa' = 2 v Im[exp(-i phi) conj(p_ab)] - p_aa - g (p_aa - 1/2)
               p_ab' = (i d - 1 - g) p_ab - i v exp(-i phi) (1 - 2 p_aa)
"""
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.integrate import simpson

from ._backend import njit, select
from .lineshapes import CptParams, DoubleResonanceParams, TwoLevelParams

_CPT, _TWO_LEVEL, _DR = 0, 1, 2

# Dormand-Prince 5(4)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_MAX_STEPS_PER_SAMPLE = 100_000


def _propagate_py(model, y, t0, dt, n_out, par, rtol, atol, h, h_max):
    """Advance state ``y`` (complex[2], updated in place) from t0 over n_out
    sample intervals of length dt. Returns samples (n_out + 1, 2) and the
    step size to start the next call with."""
    delta = par[0]
    omega = par[1]
    m = par[2]
    v = par[3]
    g = par[4]
    out = np.empty((n_out + 1, 2), dtype=np.complex128)
    out[0, 0] = y[0]
    out[0, 1] = y[1]
    K = np.zeros((7, 2), dtype=np.complex128)
    t = t0
    have_k1 = False
    for j in range(1, n_out + 1):
        target = t0 + j * dt
        steps = 0
        while t < target:
            steps += 1
            if steps > _MAX_STEPS_PER_SAMPLE:
                raise RuntimeError("step size underflow in oracle integration")
            hh = min(h, h_max)
            clipped = False
            if t + hh >= target:
                hh = target - t
                clipped = True
            for s in range(7):
                if s == 0 and have_k1:
                    continue
                ts = t + _C[s] * hh
                y1 = y[0]
                y2 = y[1]
                for q in range(s):
                    y1 += hh * _A[s, q] * K[q, 0]
                    y2 += hh * _A[s, q] * K[q, 1]
                ph = m * math.sin(omega * ts)
                if model == 0:
                    K[s, 0] = complex(-1.0, delta) * y1 + complex(math.cos(2.0 * ph), -math.sin(2.0 * ph))
                    K[s, 1] = 0.0
                else:
                    e = complex(math.cos(ph), -math.sin(ph))
                    x = e * y2.conjugate()
                    if model == 1:
                        K[s, 0] = 2.0 * v * x.imag - 2.0 * y1
                        K[s, 1] = complex(-1.0, delta) * y2 - 1j * v * e
                    else:
                        K[s, 0] = 2.0 * v * x.imag - y1 - g * (y1 - 0.5)
                        K[s, 1] = complex(-1.0 - g, delta) * y2 - 1j * v * e * (1.0 - 2.0 * y1)
                have_k1 = True
            # stage 7 was evaluated at the 5th-order solution
            n1 = y[0]
            n2 = y[1]
            e1 = 0j
            e2 = 0j
            for q in range(7):
                if q < 6:
                    n1 += hh * _A[6, q] * K[q, 0]
                    n2 += hh * _A[6, q] * K[q, 1]
                e1 += hh * _E[q] * K[q, 0]
                e2 += hh * _E[q] * K[q, 1]
            w1 = atol[0] + rtol * max(abs(y[0]), abs(n1))
            w2 = atol[1] + rtol * max(abs(y[1]), abs(n2))
            err = max(abs(e1) / w1, abs(e2) / w2)
            if err <= 1.0:
                t = target if clipped else t + hh
                y[0] = n1
                y[1] = n2
                K[0, 0] = K[6, 0]
                K[0, 1] = K[6, 1]
                fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
                hn = hh * fac
                h = max(hn, h) if clipped else hn
            else:
                # K[0] still holds f(t, y)
                h = hh * max(0.2, 0.9 * err ** -0.2)
        out[j, 0] = y[0]
        out[j, 1] = y[1]
    return out, h


_propagate_numba = njit(_propagate_py)
_propagate = select(_propagate_numba, _propagate_py)


@dataclass(frozen=True)
class OdeSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    transient_periods_min: int = 5
    detection_periods: int = 8
    samples_per_period: int = 512
    max_periods: int = 10_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (0 < v <= 1e-6):
                raise ValueError(f"{name} must lie in (0, 1e-6], got {v!r}")
        if self.transient_periods_min < 1 or self.detection_periods < 1:
            raise ValueError("period counts must be >= 1")
        if self.samples_per_period < 8 or self.samples_per_period % 2:
            raise ValueError("samples_per_period must be even and >= 8")


@dataclass(frozen=True)
class TimeDomainResult:
    in_phase: float
    quadrature: float
    dc: float
    settled: bool
    periods: int = 0
    per_period: Tuple[Tuple[float, float], ...] = ()
    population_min: float = float("nan")
    population_max: float = float("nan")


def _integrate(model, par, y0, atol_scale, settings, signal_fn, coef, population_fn):
    omega = par[1]
    period = 2.0 * math.pi / omega
    rtol = settings.rel_tol
    atol = settings.abs_tol * np.asarray(atol_scale, dtype=float)
    y = np.array(y0, dtype=np.complex128)
    # Keep |h * rate| well inside the stability region; near its edge the
    # controller lets fast rotating modes linger at the tolerance level.
    rate = abs(par[0]) + 1.0 + par[4] + 2.0 * par[1] * par[2] + par[3]
    h_max = 1.0 / rate
    h = min(0.05, period / 16, h_max)

    n_min = max(settings.transient_periods_min, int(math.ceil(5.0 / period)))
    t = 0.0
    prev_change = None
    settled = False
    n = 0
    while n < settings.max_periods:
        before = y.copy()
        _, h = _propagate(model, y, t, period, 1, par, rtol, atol, h, h_max)
        n += 1
        t = n * period
        change = float(np.max(np.abs(y - before) / np.asarray(atol_scale)))
        if n >= n_min and prev_change is not None:
            q = change / prev_change if prev_change > 0 else 0.0
            if change <= 1e-3 * rtol:
                settled = True
            elif q < 0.999 and change / (1.0 - q) < rtol:
                settled = True
        prev_change = change
        if settled:
            break

    N = settings.samples_per_period
    dt = period / N
    per = []
    dc = 0.0
    pop_min = math.inf
    pop_max = -math.inf
    for _ in range(settings.detection_periods):
        samples, h = _propagate(model, y, t, dt, N, par, rtol, atol, h, h_max)
        ts = t + dt * np.arange(N + 1)
        sig = signal_fn(ts, samples)
        pop = population_fn(ts, sig, samples)
        pop_min = min(pop_min, float(pop.min()))
        pop_max = max(pop_max, float(pop.max()))
        i = coef * simpson(sig * np.cos(omega * ts), dx=dt) / period
        q = coef * simpson(sig * np.sin(omega * ts), dx=dt) / period
        dc += simpson(sig, dx=dt) / period
        per.append((float(i), float(q)))
        n += 1
        t = n * period
    arr = np.array(per)
    return TimeDomainResult(float(arr[:, 0].mean()), float(arr[:, 1].mean()),
                            dc / settings.detection_periods, settled, n, tuple(per), pop_min, pop_max)


DEFAULT_SETTINGS = OdeSettings()


def integrate_cpt(p: CptParams, s: OdeSettings = DEFAULT_SETTINGS) -> TimeDomainResult:
    """CPT first harmonic from the ground-state coherence equation.

    Reports cos/sin coefficients of y = Re[exp(2i phi) r] (same normalization
    as :func:`pmlock.lineshapes.cpt_first_harmonic`). ``population_*`` track
    y itself; the excited-state population stays non-negative iff y <= 1.
    """
    par = np.array([p.delta_bar, p.omega_m_bar, p.m, 1.0, 0.0])

    def signal(ts, z):
        phi = p.m * np.sin(p.omega_m_bar * ts)
        return (np.exp(2j * phi) * z[:, 0]).real

    return _integrate(_CPT, par, [0j, 0j], [1.0, 1.0], s, signal, 2.0, lambda ts, y, z: y)


def integrate_two_level(p: TwoLevelParams, s: OdeSettings = DEFAULT_SETTINGS) -> TimeDomainResult:
    """Two-level first harmonic: <rho_ee cos(w t)>, <rho_ee sin(w t)> = Re A, Im A."""
    par = np.array([p.delta_L_bar, p.omega_m_bar, p.m, math.sqrt(p.S), 0.0])
    pop = lambda ts, y, z: z[:, 0].real
    return _integrate(_TWO_LEVEL, par, [0j, 0j], [p.S, math.sqrt(p.S)], s,
                      lambda ts, z: z[:, 0].real, 1.0, pop)


def integrate_dr(p: DoubleResonanceParams, s: OdeSettings = DEFAULT_SETTINGS,
                 gamma_g_ratio: float = 1e-3) -> TimeDomainResult:
    """Double-resonance first harmonic of rho_aa, ground-state relaxation kept explicitly."""
    if not (0 <= gamma_g_ratio < 1):
        raise ValueError("gamma_g_ratio must lie in [0, 1)")
    g = gamma_g_ratio
    par = np.array([p.delta_rf_bar, p.omega_m_bar, p.m, math.sqrt(p.s_rf), g])
    y0 = [complex(g / (2.0 * (1.0 + g))), 0j]
    pop = lambda ts, y, z: z[:, 0].real
    return _integrate(_DR, par, y0, [p.s_rf + g, math.sqrt(p.s_rf)], s,
                      lambda ts, z: z[:, 0].real, 1.0, pop)


def integrate(p, s: OdeSettings = DEFAULT_SETTINGS, **kw) -> TimeDomainResult:
    if isinstance(p, CptParams):
        return integrate_cpt(p, s)
    if isinstance(p, TwoLevelParams):
        return integrate_two_level(p, s)
    if isinstance(p, DoubleResonanceParams):
        return integrate_dr(p, s, **kw)
    raise TypeError(f"unsupported parameter type {type(p).__name__}")
