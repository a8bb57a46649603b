"""Bessel-free reference for the first harmonic.

The CPT and two-level equations are linear with periodic forcing, so their
periodic steady state follows from the FFT of the forcing sampled over one
modulation period: each Fourier mode n of the drive is divided by the
relaxation factor at frequency n*w. No Jacobi-Anger expansion is involved.
"""
import numpy as np

N = 4096


def _modes(n_samples):
    n = np.fft.fftfreq(n_samples, d=1.0 / n_samples)  # integer mode numbers
    return n


def _periodic_solution(forcing, rate, omega):
    """Periodic z with z' = rate * z + forcing(t); forcing sampled on t_j = j T / N."""
    F = np.fft.fft(forcing) / forcing.size
    n = _modes(forcing.size)
    # mode exp(+i n w t): i n w Z = rate Z + F
    Z = F / (1j * n * omega - rate)
    return np.fft.ifft(Z * forcing.size)


def _cos_sin(signal):
    S = np.fft.fft(signal) / signal.size
    # signal = sum S_n exp(i n w t); cos coefficient 2 Re S_1, sin coefficient -2 Im S_1
    return 2.0 * S[1].real, -2.0 * S[1].imag


def cpt(delta, omega, m, n=N):
    t = np.arange(n) * (2 * np.pi / omega) / n
    phi = m * np.sin(omega * t)
    r = _periodic_solution(np.exp(-2j * phi), 1j * delta - 1.0, omega)
    y = (np.exp(2j * phi) * r).real
    return _cos_sin(y)


def two_level(delta, omega, m, S, n=N, decay=2.0):
    t = np.arange(n) * (2 * np.pi / omega) / n
    phi = m * np.sin(omega * t)
    v = np.sqrt(S)
    rho_eg = _periodic_solution(-1j * v * np.exp(-1j * phi), 1j * delta - 1.0, omega)
    drive = 2.0 * v * (np.exp(-1j * phi) * np.conj(rho_eg)).imag
    rho_ee = _periodic_solution(drive.astype(complex), -decay, omega).real
    c, s = _cos_sin(rho_ee)
    return c / 2.0, s / 2.0


def dr_linear(delta, omega, m, s_rf, n=N):
    """Double resonance with Gamma_g = 0 and 1 - 2 rho_aa -> 1 (leading order)."""
    return two_level(delta, omega, m, s_rf, n, decay=1.0)
