"""Gauss-Hermite wave packets for the collective coordinate.

Exact solutions of the free Schroedinger equation
``i dPsi/dt + (1/(2 m_cl)) d^2 Psi/dQ^2 = 0`` built on probabilists' Hermite
polynomials He_n.  The width and time scales are tied by
``2 sigma^2 = tau / m_cl`` and the variance spreads as
``sigma(t)^2 = sigma^2 (1 + t^2 / tau^2)``.  The fixed phase ``-(2n+1) pi/4``
makes every packet real at t = 0, and the packets stay orthonormal at each
fixed time.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .params import ModelParams

__all__ = ["WavePacket", "hermite_he", "chi_eval", "schrodinger_residual", "packet_superposition_evolve"]


def hermite_he(n: int, x):
    """Probabilists' Hermite polynomial by the stable three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if n < 0:
        raise ValueError("Hermite index must be nonnegative")
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev
    h = x.copy()
    for j in range(1, n):
        h, h_prev = x * h - j * h_prev, h
    return h


@dataclass(frozen=True)
class WavePacket:
    """Hermite index, initial width and the derived time scale tau = 2 sigma^2 m_cl."""

    n: int
    sigma: float
    p: ModelParams = ModelParams()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("index must be >= 0")
        if not self.sigma > 0:
            raise ValueError("width must be positive")

    @property
    def tau(self) -> float:
        return 2.0 * self.sigma**2 * self.p.m_cl

    def width(self, t: float) -> float:
        """Spread width sigma(t) = sigma sqrt(1 + t^2/tau^2)."""
        return self.sigma * np.sqrt(1.0 + (t / self.tau) ** 2)


def _packet_pieces(wp: WavePacket, t: float, Q):
    """Common factors of chi_n and its derivatives at time t."""
    Q = np.asarray(Q, dtype=float)
    n, sig, tau = wp.n, wp.sigma, wp.tau
    sig_t2 = sig**2 * (1.0 + (t / tau) ** 2)
    sig_t = np.sqrt(sig_t2)
    # phases continuous in t: principal sqrt never crosses the cut since
    # Im(t - i tau) = -tau < 0; the ratio power is a pure phase e^{i n theta}
    theta = np.arctan2(tau, t)
    amp = (
        1.0 / np.sqrt(factorial(n) * np.sqrt(2.0 * np.pi))
        * np.sqrt(tau / sig)
        / np.sqrt(complex(t, -tau))
        * np.exp(1j * n * theta)
        * np.exp(-1j * (2 * n + 1) * np.pi / 4.0)
    )
    c = (1j * t / tau - 1.0) / (4.0 * sig_t2)  # exponent coefficient of Q^2
    u = Q / sig_t
    return amp, c, u, sig_t, sig_t2


def chi_eval(wp: WavePacket, t: float, Q):
    """Evaluate chi_n(t, Q; sigma)."""
    amp, c, u, sig_t, _ = _packet_pieces(wp, t, Q)
    return amp * hermite_he(wp.n, u) * np.exp(c * np.asarray(Q, float) ** 2)


def chi_time_derivative(wp: WavePacket, t: float, Q):
    """Analytic d(chi_n)/dt."""
    Q = np.asarray(Q, dtype=float)
    n, sig, tau = wp.n, wp.sigma, wp.tau
    amp, c, u, sig_t, sig_t2 = _packet_pieces(wp, t, Q)
    he = hermite_he(n, u)
    hep = n * hermite_he(n - 1, u) if n > 0 else np.zeros_like(u)
    # d/dt log amp = -1/(2(t - i tau)) + i n dtheta/dt,  dtheta/dt = -tau/(t^2+tau^2)
    dlog_amp = -0.5 / complex(t, -tau) - 1j * n * tau / (t * t + tau * tau)
    dsig2 = 2.0 * sig**2 * t / tau**2  # d sigma(t)^2 / dt
    dc = (1j / tau) / (4.0 * sig_t2) - (1j * t / tau - 1.0) * dsig2 / (4.0 * sig_t2**2)
    du = -0.5 * Q * dsig2 / sig_t**3  # d(Q/sigma_t)/dt
    return (dlog_amp + dc * Q * Q) * amp * he * np.exp(c * Q * Q) + amp * np.exp(c * Q * Q) * hep * du


def chi_second_derivative(wp: WavePacket, t: float, Q):
    """Analytic d^2(chi_n)/dQ^2."""
    Q = np.asarray(Q, dtype=float)
    n = wp.n
    amp, c, u, sig_t, _ = _packet_pieces(wp, t, Q)
    he = hermite_he(n, u)
    hep = n * hermite_he(n - 1, u) if n > 0 else np.zeros_like(u)
    hepp = n * (n - 1) * hermite_he(n - 2, u) if n > 1 else np.zeros_like(u)
    e = np.exp(c * Q * Q)
    return amp * e * (
        hepp / sig_t**2
        + 2.0 * hep * (2.0 * c * Q) / sig_t
        + he * (2.0 * c + 4.0 * c * c * Q * Q)
    )


def schrodinger_residual(wp: WavePacket, t: float, Q) -> float:
    """Sup-norm of i d(chi)/dt + (1/(2 m_cl)) d^2(chi)/dQ^2, relative to max|chi|."""
    chi = chi_eval(wp, t, Q)
    res = 1j * chi_time_derivative(wp, t, Q) + chi_second_derivative(wp, t, Q) / (2.0 * wp.p.m_cl)
    return float(np.max(np.abs(res)) / np.max(np.abs(chi)))


def packet_superposition_evolve(coeffs, sigma: float, t: float, Q, p: ModelParams = ModelParams()):
    """Evaluate sum_n c_n chi_n(t, Q) for finitely many coefficients."""
    Q = np.asarray(Q, dtype=float)
    out = np.zeros(Q.shape, dtype=complex)
    for n, cn in enumerate(np.asarray(coeffs, dtype=complex)):
        if cn != 0.0:
            out += cn * chi_eval(WavePacket(n=n, sigma=sigma, p=p), t, Q)
    return out
