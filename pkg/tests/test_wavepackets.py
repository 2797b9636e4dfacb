import numpy as np
import pytest

from kinkspec.params import ModelParams
from kinkspec.wavepackets import (
    WavePacket,
    chi_eval,
    hermite_he,
    packet_superposition_evolve,
    schrodinger_residual,
)


@pytest.fixture(scope="module")
def qline():
    q = np.linspace(-60.0, 60.0, 8001)
    return q, q[1] - q[0]


def test_hermite_matches_numpy_reference():
    # independent evaluation through numpy's hermite_e module (Rodrigues-based
    # coefficient representation)
    x = np.linspace(-3.0, 3.0, 11)
    for n in range(11):
        coef = np.zeros(n + 1)
        coef[n] = 1.0
        ref = np.polynomial.hermite_e.hermeval(x, coef)
        assert np.max(np.abs(hermite_he(n, x) - ref)) < 1e-9 * max(1.0, np.max(np.abs(ref)))


def test_hermite_recurrence():
    x = np.linspace(-2.5, 2.5, 7)
    for n in range(1, 10):
        lhs = hermite_he(n + 1, x)
        rhs = x * hermite_he(n, x) - n * hermite_he(n - 1, x)
        assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.max(np.abs(lhs)))


def test_width_relation(p):
    wp = WavePacket(0, 0.8, p)
    assert 2.0 * wp.sigma**2 == pytest.approx(wp.tau / p.m_cl, rel=1e-15)
    for t in (0.0, 1.0, 7.0):
        assert wp.width(t) ** 2 == pytest.approx(wp.sigma**2 * (1 + (t / wp.tau) ** 2), rel=1e-14)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_normalization_at_all_times(n, p, qline):
    Q, dQ = qline
    wp = WavePacket(n, 0.8, p)
    for t in (0.0, wp.tau, 5.0 * wp.tau):
        chi = chi_eval(wp, t, Q)
        assert np.sum(np.abs(chi) ** 2) * dQ == pytest.approx(1.0, abs=1e-10)


def test_real_at_t0(p, qline):
    Q, _ = qline
    for n in (0, 1, 2, 5):
        chi = chi_eval(WavePacket(n, 0.8, p), 0.0, Q)
        assert np.max(np.abs(chi.imag)) < 1e-12


def test_orthonormal_basis_fixed_time(p, qline):
    Q, dQ = qline
    t = 2.3
    chis = [chi_eval(WavePacket(n, 0.8, p), t, Q) for n in range(5)]
    gram = np.array([[np.sum(np.conj(a) * b) * dQ for b in chis] for a in chis])
    assert np.max(np.abs(gram - np.eye(5))) < 1e-10


@pytest.mark.parametrize("n", [0, 1, 3, 5])
def test_schrodinger_residual(n, p, qline):
    Q, _ = qline
    wp = WavePacket(n, 0.8, p)
    for t in (0.0, 0.6 * wp.tau, 3.1 * wp.tau):
        assert schrodinger_residual(wp, t, Q) < 1e-8


def test_variance_law(p, qline):
    Q, dQ = qline
    wp = WavePacket(0, 0.8, p)
    for t in (0.0, wp.tau, 2.5 * wp.tau):
        chi = chi_eval(wp, t, Q)
        var = np.sum(Q * Q * np.abs(chi) ** 2) * dQ
        assert abs(var - wp.width(t) ** 2) / wp.width(t) ** 2 < 1e-6


@pytest.mark.parametrize("n,r", [(0, 1), (0, 2), (1, 1), (2, 2), (3, 1)])
def test_moment_scaling_structure(n, r, p, qline):
    # int |chi_n|^2 Q^{2r} dQ = c_{n,r} 2^r sigma^{2r} (1 + t^2/tau^2)^r with
    # c_{n,r} fixed by the t = 0 quadrature
    Q, dQ = qline
    wp = WavePacket(n, 0.8, p)
    m0 = np.sum(Q ** (2 * r) * np.abs(chi_eval(wp, 0.0, Q)) ** 2) * dQ
    c_nr = m0 / (2.0**r * wp.sigma ** (2 * r))
    for t in (wp.tau, 2.0 * wp.tau):
        mt = np.sum(Q ** (2 * r) * np.abs(chi_eval(wp, t, Q)) ** 2) * dQ
        expect = c_nr * 2.0**r * wp.sigma ** (2 * r) * (1 + (t / wp.tau) ** 2) ** r
        assert mt == pytest.approx(expect, rel=1e-8)


def test_truncated_completeness(p, qline):
    # displaced Gaussian recovered from the n <= 30 basis at t = 0
    Q, dQ = qline
    sig = 0.8
    target = np.exp(-((Q - 1.1) ** 2) / (4 * sig**2)) / (2 * np.pi * sig**2) ** 0.25
    total = 0.0
    for n in range(31):
        chi = chi_eval(WavePacket(n, sig, p), 0.0, Q)
        total += abs(np.sum(np.conj(chi) * target) * dQ) ** 2
    norm = np.sum(np.abs(target) ** 2) * dQ
    assert total / norm > 1.0 - 1e-8


def test_superposition_single_mode_reduces(p, qline):
    Q, _ = qline
    out = packet_superposition_evolve([0.0, 1.0], 0.8, 1.2, Q, p)
    ref = chi_eval(WavePacket(1, 0.8, p), 1.2, Q)
    assert np.max(np.abs(out - ref)) == 0.0


def test_superposition_norm_conserved(p, qline):
    Q, dQ = qline
    c = np.array([0.6, -0.3j, 0.2, 0.1 + 0.2j])
    c = c / np.linalg.norm(c)
    # times kept such that the spread packets stay well inside the window
    norms = [np.sum(np.abs(packet_superposition_evolve(c, 0.8, t, Q, p)) ** 2) * dQ
             for t in (0.0, 1.0, 3.0, 6.0)]
    assert np.max(np.abs(np.asarray(norms) - 1.0)) < 1e-10


def test_interference_drift_vs_split_step(p, qline):
    # two-packet superposition against the exact Fourier propagator; the
    # relative phase between adjacent modes gives a nonzero mean momentum
    Q, dQ = qline
    c = np.array([1.0, 0.8j], dtype=complex)
    c /= np.linalg.norm(c)
    psi0 = packet_superposition_evolve(c, 0.8, 0.0, Q, p)
    t = 3.7
    psit = packet_superposition_evolve(c, 0.8, t, Q, p)
    k = 2 * np.pi * np.fft.fftfreq(Q.size, d=dQ)
    oracle = np.fft.ifft(np.exp(-1j * k**2 * t / (2 * p.m_cl)) * np.fft.fft(psi0))
    assert np.max(np.abs(psit - oracle)) < 1e-10
    # centroid drift follows free dispersion: <Q>(t) = <Q>(0) + t <P>/m_cl
    x0 = np.sum(Q * np.abs(psi0) ** 2) * dQ
    xt = np.sum(Q * np.abs(psit) ** 2) * dQ
    dpsi = np.gradient(psi0, dQ)
    p_mean = float(np.imag(np.sum(np.conj(psi0) * dpsi) * dQ))
    assert abs(p_mean) > 1e-3  # genuinely moving pattern
    assert xt - x0 == pytest.approx(t * p_mean / p.m_cl, rel=1e-4)


def test_invalid_packet_rejected(p):
    with pytest.raises(ValueError):
        WavePacket(-1, 0.8, p)
    with pytest.raises(ValueError):
        WavePacket(0, 0.0, p)
