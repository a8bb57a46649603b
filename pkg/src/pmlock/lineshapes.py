"""First-harmonic responses as truncated Bessel-Lorentzian series.

All three systems reduce to two sums over the sideband index k,

    B = sum_k J_k J_{k-1} L_k,    C = sum_k J_k J_{k+1} L_k,
    L_k = 1 / (detuning + k * omega + i),

with frequencies in units of the resonance half width. Each model is a
different linear combination of B and C (and their detuning derivatives,
dL/d(detuning) = -L^2).

Normalization: the amplitude prefactors are reduced to dimensionless scale
factors. CPT drops -4 V^2/(gamma Gamma) * V^2/(Gamma Gt_g) entirely (scale 1);
the two-level and double-resonance models keep S and s_rf.
"""
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from ._backend import njit, select
from .errors import DomainError
from .special import bessel_rows

MODELS = ("cpt", "two-level", "dr")


def _positive(name, v):
    if not (math.isfinite(v) and v > 0):
        raise DomainError(f"{name} must be finite and > 0, got {v!r}")


def _nonneg(name, v):
    if not (math.isfinite(v) and v >= 0):
        raise DomainError(f"{name} must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class CptParams:
    """Lambda-system CPT; frequencies in units of the ground-state width."""
    delta_bar: float
    omega_m_bar: float
    m: float

    model = "cpt"

    def __post_init__(self):
        if not math.isfinite(self.delta_bar):
            raise DomainError("delta_bar must be finite")
        _positive("omega_m_bar", self.omega_m_bar)
        _nonneg("m", self.m)

    @property
    def detuning(self):
        return self.delta_bar

    @property
    def scale(self):
        return 1.0

    @property
    def bessel_argument(self):
        return 2.0 * self.m


@dataclass(frozen=True)
class TwoLevelParams:
    """Two-level optical line; frequencies in units of gamma/2, S = [V/(gamma/2)]^2."""
    delta_L_bar: float
    omega_m_bar: float
    m: float
    S: float = 1.0

    model = "two-level"

    def __post_init__(self):
        if not math.isfinite(self.delta_L_bar):
            raise DomainError("delta_L_bar must be finite")
        _positive("omega_m_bar", self.omega_m_bar)
        _nonneg("m", self.m)
        _positive("S", self.S)

    @property
    def detuning(self):
        return self.delta_L_bar

    @property
    def scale(self):
        return self.S

    @property
    def bessel_argument(self):
        return self.m


@dataclass(frozen=True)
class DoubleResonanceParams:
    """Radio-optical double resonance; frequencies in units of the pumping rate V^2/Gamma."""
    delta_rf_bar: float
    omega_m_bar: float
    m: float
    s_rf: float = 1.0

    model = "dr"

    def __post_init__(self):
        if not math.isfinite(self.delta_rf_bar):
            raise DomainError("delta_rf_bar must be finite")
        _positive("omega_m_bar", self.omega_m_bar)
        _nonneg("m", self.m)
        _positive("s_rf", self.s_rf)

    @property
    def detuning(self):
        return self.delta_rf_bar

    @property
    def scale(self):
        return self.s_rf

    @property
    def bessel_argument(self):
        return self.m


_PARAM_TYPES = {"cpt": CptParams, "two-level": TwoLevelParams, "dr": DoubleResonanceParams}


def make_params(model, detuning, omega_m_bar, m, scale=1.0):
    """Build the parameter object for ``model`` from generic field names."""
    model = canonical_model(model)
    cls = _PARAM_TYPES[model]
    if model == "cpt":
        if scale != 1.0:
            raise DomainError("the CPT model has no amplitude scale")
        return cls(detuning, omega_m_bar, m)
    return cls(detuning, omega_m_bar, m, scale)


def canonical_model(model):
    name = str(model).lower().replace("_", "-")
    if name in ("two-level", "twolevel", "tl"):
        return "two-level"
    if name in ("cpt", "dr"):
        return name
    raise DomainError(f"unknown model {model!r}; expected one of {MODELS}")


@dataclass(frozen=True)
class SeriesTruncation:
    """Sideband truncation |k| <= k_max.

    ``adaptive`` raises k_max to ceil(x) + 60 when the Bessel argument x
    needs it; ``fixed`` uses k_max as given.
    """
    k_max: int = 100
    policy: Literal["fixed", "adaptive"] = "adaptive"

    def __post_init__(self):
        if int(self.k_max) < 1:
            raise DomainError("k_max must be >= 1")
        if self.policy not in ("fixed", "adaptive"):
            raise DomainError(f"unknown truncation policy {self.policy!r}")

    def resolve(self, bessel_argument):
        if self.policy == "fixed":
            return int(self.k_max)
        return max(int(self.k_max), int(math.ceil(abs(bessel_argument))) + 60)


ADAPTIVE = SeriesTruncation()


@dataclass(frozen=True)
class HarmonicResponse:
    in_phase: float
    quadrature: float

    def __iter__(self):
        return iter((self.in_phase, self.quadrature))

    @property
    def magnitude(self):
        return math.hypot(self.in_phase, self.quadrature)


# --- kernels -------------------------------------------------------------

def _sums_loop(rows, k_max, delta, omega):
    n = rows.shape[0]
    B = np.zeros(n, dtype=np.complex128)
    C = np.zeros(n, dtype=np.complex128)
    dB = np.zeros(n, dtype=np.complex128)
    dC = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        b = 0j
        c = 0j
        db = 0j
        dc = 0j
        for k in range(-k_max, k_max + 1):
            ak = abs(k)
            jk = rows[i, ak]
            if k < 0 and ak % 2 == 1:
                jk = -jk
            q = k - 1
            jm = rows[i, abs(q)]
            if q < 0 and (-q) % 2 == 1:
                jm = -jm
            q = k + 1
            jp = rows[i, abs(q)]
            if q < 0 and (-q) % 2 == 1:
                jp = -jp
            lk = 1.0 / complex(delta + k * omega, 1.0)
            l2 = lk * lk
            b += jk * jm * lk
            c += jk * jp * lk
            db -= jk * jm * l2
            dc -= jk * jp * l2
        B[i] = b
        C[i] = c
        dB[i] = db
        dC[i] = dc
    return B, C, dB, dC


def _sums_numpy(rows, k_max, delta, omega):
    rows = np.asarray(rows)
    k = np.arange(-k_max - 1, k_max + 2)
    sign = np.where((k < 0) & (np.abs(k) % 2 == 1), -1.0, 1.0)
    full = rows[:, np.abs(k)] * sign
    jk = full[:, 1:-1]
    jm = full[:, :-2]
    jp = full[:, 2:]
    lk = 1.0 / ((delta + k[1:-1] * omega) + 1j)
    l2 = lk * lk
    pm = jk * jm
    pp = jk * jp
    return pm @ lk, pp @ lk, -(pm @ l2), -(pp @ l2)


_sums_numba = njit(_sums_loop)
_sums_kernel = select(_sums_numba, _sums_numpy)


def lorentz_sums(x_values, delta, omega, k_max):
    """B, C and their detuning derivatives for each Bessel argument in ``x_values``."""
    rows = bessel_rows(x_values, k_max + 1)
    return _sums_kernel(rows, int(k_max), float(delta), float(omega))


def _combine(model, omega, scale, B, C):
    """(in_phase, quadrature) arrays from the sums B, C (or their derivatives)."""
    if model == "cpt":
        return -(B + C).imag, (B - C).real
    width = 2.0 if model == "two-level" else 1.0
    A = scale / complex(omega, width) * (np.conj(C) - B)
    return A.real, A.imag


def _series(p, truncation):
    k_max = truncation.resolve(p.bessel_argument)
    return k_max, lorentz_sums([p.bessel_argument], p.detuning, p.omega_m_bar, k_max)


def _response(p, truncation):
    if p.m == 0.0:
        return HarmonicResponse(0.0, 0.0)
    _, (B, C, _, _) = _series(p, truncation)
    i, q = _combine(p.model, p.omega_m_bar, p.scale, B, C)
    return HarmonicResponse(float(i[0]), float(q[0]))


def cpt_first_harmonic(p: CptParams, t: SeriesTruncation = ADAPTIVE) -> HarmonicResponse:
    """Coefficients of cos(w t) and sin(w t) in the CPT first harmonic.

    in_phase = sum_k J_k (J_{k-1} + J_{k+1}) / ((d + k w)^2 + 1) with J = J(2m).
    """
    return _response(p, t)


def two_level_first_harmonic(p: TwoLevelParams, t: SeriesTruncation = ADAPTIVE) -> HarmonicResponse:
    """Re and Im of the complex amplitude A with rho_ee,1(t) = 2 Re[A exp(-i w t)].

    A = S / (w + 2i) * sum_k J_k [J_{k+1} / (D + k w - i) - J_{k-1} / (D + k w + i)].
    """
    return _response(p, t)


def dr_first_harmonic(p: DoubleResonanceParams, t: SeriesTruncation = ADAPTIVE) -> HarmonicResponse:
    """Double-resonance analogue of :func:`two_level_first_harmonic` (rho_aa amplitude).

    The only structural difference is the prefactor s_rf / (w + i).
    """
    return _response(p, t)


def first_harmonic(p, t: SeriesTruncation = ADAPTIVE) -> HarmonicResponse:
    return _response(p, t)


def detuning_slopes(model, omega_m_bar, ms, scale=1.0, t: SeriesTruncation = ADAPTIVE):
    """d(in_phase)/d(detuning) and d(quadrature)/d(detuning) at zero detuning.

    Vectorized over modulation indices ``ms``; one truncation (set by the
    largest index) is shared by the whole batch.
    """
    model = canonical_model(model)
    ms = np.atleast_1d(np.asarray(ms, dtype=float))
    if np.any(ms < 0) or not np.all(np.isfinite(ms)):
        raise DomainError("modulation indices must be finite and >= 0")
    _positive("omega_m_bar", omega_m_bar)
    xs = 2.0 * ms if model == "cpt" else ms
    k_max = t.resolve(xs.max() if xs.size else 0.0)
    _, _, dB, dC = lorentz_sums(xs, 0.0, omega_m_bar, k_max)
    di, dq = _combine(model, omega_m_bar, scale, dB, dC)
    zero = ms == 0.0
    di = np.where(zero, 0.0, di)
    dq = np.where(zero, 0.0, dq)
    return di, dq


# --- closed forms --------------------------------------------------------

def _weighted_square_sum(x, omega, delta, k_max, paired):
    k = np.arange(1, k_max + 1)
    jk = bessel_rows([x], k_max)[0, 1:]
    num = (k * jk) ** 2
    if paired:
        den = ((delta + k * omega) ** 2 + 1.0) * ((delta - k * omega) ** 2 + 1.0)
    else:
        den = ((k * omega) ** 2 + 1.0) ** 2
    return float(np.sum(num / den))


def cpt_in_phase_closed_form(p: CptParams, variant: Literal["pair_sum", "small_delta"] = "pair_sum",
                             t: SeriesTruncation = ADAPTIVE) -> float:
    """CPT in-phase amplitude from Lorentzian pairs placed at +-k w.

    pair_sum:    -4 d (w/m) sum_{k>=1} [k J_k(2m)]^2 / ([(d + k w)^2 + 1][(d - k w)^2 + 1])
    small_delta: -4 d (w/m) sum_{k>=1} [k J_k(2m) / ((k w)^2 + 1)]^2
    """
    if p.m == 0.0:
        raise DomainError("closed form carries 1/m; use cpt_first_harmonic for m = 0")
    if variant not in ("pair_sum", "small_delta"):
        raise DomainError(f"unknown variant {variant!r}")
    x = p.bessel_argument
    s = _weighted_square_sum(x, p.omega_m_bar, p.delta_bar, t.resolve(x), variant == "pair_sum")
    return -4.0 * p.delta_bar * p.omega_m_bar / p.m * s


def two_level_central_amplitude(p: TwoLevelParams) -> float:
    """Central dispersive curve 2 J0(m) J1(m) (S/w) D/(D^2 + 1), valid for w >> 1."""
    if p.omega_m_bar == 0.0:
        raise DomainError("omega_m_bar must be nonzero")
    row = bessel_rows([p.m], 1)[0]
    d = p.delta_L_bar
    return float(2.0 * row[0] * row[1] * p.S / p.omega_m_bar * d / (d * d + 1.0))


def two_level_in_phase_low_freq(p: TwoLevelParams, t: SeriesTruncation = ADAPTIVE) -> float:
    """Dominant in-phase term for w << 1, D << 1:
    -4 D S (w/m) sum_{k>=1} [k J_k(m) / ((k w)^2 + 1)]^2."""
    if p.m == 0.0:
        raise DomainError("closed form carries 1/m")
    s = _weighted_square_sum(p.m, p.omega_m_bar, 0.0, t.resolve(p.m), False)
    return -4.0 * p.delta_L_bar * p.S * p.omega_m_bar / p.m * s


def low_freq_slopes(model, omega_m_bar, ms, scale=1.0, t: SeriesTruncation = ADAPTIVE):
    """|d(in_phase)/d(detuning)| at zero detuning from the low-frequency form.

    CPT uses 4 (w/m) sum [k J_k(2m) / ((k w)^2 + 1)]^2; the two-level form
    uses J_k(m) and carries S. The double-resonance prefactor s_rf/(w + i)
    is twice the two-level S/(w + 2i) at w -> 0, hence the factor 8.
    """
    model = canonical_model(model)
    ms = np.atleast_1d(np.asarray(ms, dtype=float))
    xs = 2.0 * ms if model == "cpt" else ms
    k_max = t.resolve(xs.max())
    k = np.arange(1, k_max + 1)
    rows = bessel_rows(xs, k_max)[:, 1:]
    w = (k / ((k * omega_m_bar) ** 2 + 1.0)) ** 2
    s = (rows ** 2) @ w
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (8.0 if model == "dr" else 4.0) * scale * omega_m_bar * s / ms
    return np.where(ms == 0.0, 0.0, out)
