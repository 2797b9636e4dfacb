"""Regularized operator kernels, covariance comparison and counter-terms.

Central objects:

* ``regularized_kernel`` assembles mollified spectral-calculus kernels
  F(K)_kappa and their free (plane-wave) counterparts F(K0)_kappa.
* ``kernel_A3`` is the explicit closed-form kernel of
  ``(C^theta)^(1/2) - C0^(1/2)`` where ``C^theta = (K + theta P0)^(-1)``;
  its continuum part reduces to four slowly decaying moments I_j of the
  momentum integrand, with the quartic growth of the numerator cancelling.
* ``build_s_matrix`` forms the trace-class covariance comparison
  ``S(theta) = C0^(1/4) ((K^theta)^(1/2) - K0^(1/2)) C0^(1/4)``
  through the exact resolvent identity ``1 + S = (1 + B)^(-1)`` with
  ``B = K0^(1/4) A3 K0^(1/4)``, followed by the exact rank-one shift in
  sqrt(theta).  S(0) has eigenvalue -1 with eigenvector K0^(1/4) psi0.
* ``log_det_factor`` is the finite-dimensional determinant surrogate
  ``(1/2) sum log(1 + lambda_n)``.
* ``zero_point_discrepancy`` measures the mismatch between the local Wick
  constant gamma_kappa and the asymmetrically smeared pairing that appears
  in the zero-point bookkeeping; it decays like log(kappa)/kappa pointwise,
  while its signed integral vanishes identically by translation invariance.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .mollifier import Mollifier, gamma_kappa
from .oscquad import ij_toeplitz
from .params import Grid, ModelParams, MomentumGrid, momentum_grid
from .spectral_core import (
    eigenfunction_matrix,
    psi0,
    psi1,
    sech,
    smeared_eigenfunction_matrix,
)

__all__ = [
    "KernelMatrix",
    "ThetaDeformation",
    "SMatrixResult",
    "ZeroPointResult",
    "regularized_kernel",
    "kernel_A3",
    "build_s_matrix",
    "build_S_matrix",
    "log_det_factor",
    "zero_point_discrepancy",
    "fourier_multiplier",
    "apply_fourier_multiplier",
    "wick_power",
    "counter_term_density",
]


@dataclass(frozen=True)
class ThetaDeformation:
    """Strictly positive deformation of the zero mode, tied to a packet width
    by sqrt(theta) = 1 / (2 sigma^2 m_cl)."""

    theta: float

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("theta must be positive")

    def sigma(self, p: ModelParams) -> float:
        return float((2.0 * np.sqrt(self.theta) * p.m_cl) ** -0.5)

    @classmethod
    def from_sigma(cls, sigma: float, p: ModelParams) -> "ThetaDeformation":
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        return cls(theta=(1.0 / (2.0 * sigma**2 * p.m_cl)) ** 2)


@dataclass
class KernelMatrix:
    """Dense discretized integral kernel F(x_i, x_j) on a position grid."""

    grid: Grid = field(repr=False)
    matrix: np.ndarray = field(repr=False)
    label: str = ""

    def hermiticity_defect(self) -> float:
        a = self.matrix
        scale = float(np.max(np.abs(a))) or 1.0
        return float(np.max(np.abs(a - a.conj().T)) / scale)

    def assert_hermitian(self, tol: float = 1e-10):
        d = self.hermiticity_defect()
        if d > tol:
            raise ValueError(f"kernel {self.label!r} fails hermiticity: defect {d:.2e}")

    def as_operator(self) -> np.ndarray:
        """Matrix acting on grid samples (kernel times quadrature weight)."""
        return self.matrix * self.grid.weights[None, :]

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.as_operator() @ np.asarray(u)

    def smear(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Bilinear pairing <f, Op g> of two grid test functions."""
        w = self.grid.weights
        return complex((np.conjugate(f) * w) @ (self.matrix @ (np.asarray(g) * w)))


def fourier_multiplier(grid: Grid, symbol) -> np.ndarray:
    """Sampled DFT symbol for a radial multiplier on the periodic extension."""
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.h)
    return np.asarray(symbol(k))


def apply_fourier_multiplier(u: np.ndarray, grid: Grid, symbol) -> np.ndarray:
    """Apply a Fourier multiplier (e.g. fractional power of K0) to grid data."""
    mult = fourier_multiplier(grid, symbol)
    out = np.fft.ifft(mult * np.fft.fft(np.asarray(u, dtype=complex), axis=-1), axis=-1)
    if not np.iscomplexobj(u) and np.max(np.abs(out.imag)) < 1e-12 * (np.max(np.abs(out.real)) + 1e-300):
        return out.real
    return out


def _k0_quarter_symbol(p: ModelParams, power: float):
    return lambda k: (k * k + 4.0 * p.m**2) ** power


def _smeared_eigfuncs(kgrid: MomentumGrid, grid: Grid, p: ModelParams, mol: Mollifier | None, kappa: float | None, free: bool):
    """Samples of (delta_kappa * E_k)(x) (or smeared plane waves) for all k nodes."""
    x = grid.nodes
    if free:
        plain = np.exp(1j * np.outer(kgrid.nodes, x))
        if mol is None or kappa is None:
            return plain
        # smearing a plane wave multiplies it by sqrt(2 pi) hat(k/kappa)
        return plain * (np.sqrt(2.0 * np.pi) * mol.fourier(kgrid.nodes / kappa))[:, None]
    if mol is None or kappa is None:
        return eigenfunction_matrix(kgrid.nodes, x, p)
    return smeared_eigenfunction_matrix(mol, kappa, kgrid.nodes, x, p)


def regularized_kernel(
    F,
    mol: Mollifier | None,
    grid: Grid,
    p: ModelParams,
    kappa: float | None = None,
    kgrid: MomentumGrid | None = None,
    free: bool = False,
    label: str = "",
) -> KernelMatrix:
    """Assemble the mollified spectral-calculus kernel F(K)_kappa.

    With ``free=True`` the plane-wave version F(K0)_kappa is built instead.
    Passing ``mol=None`` requests the unregularized kernel, which is refused
    when F does not decay fast enough for the momentum integral to converge.
    """
    if mol is not None and kappa is None:
        raise ValueError("kappa required when a mollifier is supplied")
    if kgrid is None:
        kgrid = momentum_grid(p)
    om2 = kgrid.nodes**2 + 4.0 * p.m**2
    Fval = np.asarray(F(om2), dtype=float)
    if mol is None:
        # admissibility: the continuum integrand must decay (F(omega^2) -> 0
        # faster than 1/omega), otherwise the diagonal diverges as kappa -> oo
        tail = np.abs(Fval[-1]) * kgrid.k_max
        head = np.max(np.abs(Fval)) + 1e-300
        if tail > 0.1 * head:
            raise ValueError(
                "unregularized kernel refused: spectral multiplier decays too slowly "
                f"(|F| k at k_max ~ {tail:.2e}); supply a mollifier"
            )
    E = _smeared_eigfuncs(kgrid, grid, p, mol, kappa, free)
    cont = (E.conj().T * (Fval * kgrid.weights)) @ E / (2.0 * np.pi)
    if not free:
        if mol is None or kappa is None:
            b0, b1 = psi0(grid.nodes, p), psi1(grid.nodes, p)
        else:
            b0 = mol.smear(lambda xx: psi0(xx, p), grid.nodes, kappa)
            b1 = mol.smear(lambda xx: psi1(xx, p), grid.nodes, kappa)
        cont = cont + float(F(0.0)) * np.outer(b0, b0) + float(F(3.0 * p.m**2)) * np.outer(b1, b1)
    mat = 0.5 * (cont + cont.conj().T)
    km = KernelMatrix(grid=grid, matrix=mat, label=label or ("F(K0)_kappa" if free else "F(K)_kappa"))
    km.assert_hermitian(1e-9)
    return km


# ---------------------------------------------------------------------------
# explicit closed-form kernel of (C^theta)^(1/2) - C0^(1/2)

def kernel_A3(theta: float, grid: Grid, p: ModelParams) -> KernelMatrix:
    """Closed-form kernel of the covariance square-root difference.

    A3(x,y) = psi1(x) psi1(y)/(sqrt(3) m) + psi0(x) psi0(y)/sqrt(theta)
              + (1/2pi) sum_j F_j(x,y) I_j(x - y),

    where the F_j collect the tanh/sech prefactors left after the quartic
    momentum growth cancels between the distorted and free channels.
    """
    if not theta > 0:
        raise ValueError("theta must be positive")
    m = p.m
    x = grid.nodes
    t = np.tanh(m * x)
    s = sech(m * x) ** 2
    one = np.ones_like(x)

    I = {j: ij_toeplitz(j, x, m, b=1.5) for j in range(4)}

    # F0 = 9 m^4 s(x)s(y) - 6 m^4 (s(x) + s(y))
    cont = 9.0 * m**4 * np.outer(s, s) * I[0]
    cont -= 6.0 * m**4 * (np.outer(s, one) + np.outer(one, s)) * I[0]
    # F1 = i m^3 [6 (t(y) - t(x)) - 9 (t(y) s(x) - t(x) s(y))]
    F1 = 6.0 * (np.outer(one, t) - np.outer(t, one)) - 9.0 * (np.outer(s, t) - np.outer(t, s))
    cont += 1j * m**3 * F1 * I[1]
    # F2 = 3 m^2 (s(x) + s(y)) - 9 m^2 (1 - t(x) t(y))
    F2 = 3.0 * (np.outer(s, one) + np.outer(one, s)) - 9.0 * (1.0 - np.outer(t, t))
    cont += m**2 * F2 * I[2]
    # F3 = 3 i m (t(x) - t(y))
    cont += 3j * m * (np.outer(t, one) - np.outer(one, t)) * I[3]
    cont /= 2.0 * np.pi

    v0, v1 = psi0(x, p), psi1(x, p)
    mat = cont + np.outer(v1, v1) / (np.sqrt(3.0) * m) + np.outer(v0, v0) / np.sqrt(theta)
    imag_scale = np.max(np.abs(mat.imag)) / (np.max(np.abs(mat.real)) + 1e-300)
    if imag_scale > 1e-9:
        raise FloatingPointError(f"A3 assembly left spurious imaginary part {imag_scale:.2e}")
    mat = 0.5 * (mat.real + mat.real.T)
    km = KernelMatrix(grid=grid, matrix=mat, label=f"A3(theta={theta:g})")
    km.assert_hermitian()
    return km


@dataclass
class SMatrixResult:
    """Discretized covariance comparison S(theta) with its spectral data."""

    grid: Grid = field(repr=False)
    theta: float = 0.0
    theta_ref: float = 1.0
    matrix: np.ndarray = field(default=None, repr=False)
    eigenvalues: np.ndarray = field(default=None, repr=False)  # sorted by |.| desc
    eigenvectors: np.ndarray = field(default=None, repr=False)  # columns, same order
    rank_one_vector: np.ndarray = field(default=None, repr=False)  # r = C0^(1/4) psi0

    @property
    def trace_norm(self) -> float:
        return float(np.sum(np.abs(self.eigenvalues)))

    def tail_fraction(self, n_keep: int = 200) -> float:
        a = np.abs(self.eigenvalues)
        return float(np.sum(a[n_keep:]) / np.sum(a))

    def shift(self, theta_new: float) -> "SMatrixResult":
        """Exact rank-one move in sqrt(theta); reuses the assembled kernel."""
        if theta_new < 0:
            raise ValueError("theta must be nonnegative")
        r = self.rank_one_vector
        dm = (np.sqrt(theta_new) - np.sqrt(self.theta)) * self.grid.h * np.outer(r, r)
        return _finalize_smatrix(self.grid, self.matrix + dm, theta_new, self.theta_ref, r)


def _finalize_smatrix(grid, mat, theta, theta_ref, r) -> SMatrixResult:
    mat = 0.5 * (mat + mat.T)
    try:
        lam, vec = scipy.linalg.eigh(mat)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise RuntimeError(
            f"eigen-solver failed for S(theta={theta:g}) on n={grid.n}: {exc}; "
            f"matrix scale {np.max(np.abs(mat)):.2e}"
        ) from exc
    order = np.argsort(-np.abs(lam))
    return SMatrixResult(
        grid=grid,
        theta=theta,
        theta_ref=theta_ref,
        matrix=mat,
        eigenvalues=lam[order],
        eigenvectors=vec[:, order],
        rank_one_vector=r,
    )


def build_s_matrix(theta: float, grid: Grid, p: ModelParams, theta_ref: float | None = None) -> SMatrixResult:
    """Discretize S(theta) = C0^(1/4) ((K^theta)^(1/2) - K0^(1/2)) C0^(1/4).

    Built at a strictly positive reference deformation through the exact
    identity 1 + S = (1 + B)^(-1), B = K0^(1/4) A3 K0^(1/4), then moved to the
    requested theta (zero allowed) by the rank-one shift
    S(theta) - S(theta') = (sqrt(theta) - sqrt(theta')) C0^(1/4) P0 C0^(1/4),
    which therefore holds to machine precision by construction.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if theta_ref is None:
        theta_ref = theta if theta > 0 else p.m**2
    a3 = kernel_A3(theta_ref, grid, p)
    quarter = _k0_quarter_symbol(p, 0.25)
    B = apply_fourier_multiplier(a3.matrix, grid, quarter)
    B = apply_fourier_multiplier(B.T, grid, quarter).T
    B = np.real(B) * grid.h
    B = 0.5 * (B + B.T)
    ident = np.eye(grid.n)
    try:
        S_ref = -scipy.linalg.solve(ident + B, B, assume_a="sym")
    except scipy.linalg.LinAlgError as exc:
        cond = np.linalg.cond(ident + B)
        raise RuntimeError(
            f"resolvent solve failed building S(theta_ref={theta_ref:g}): {exc}; cond(1+B) = {cond:.2e}"
        ) from exc
    r = apply_fourier_multiplier(psi0(grid.nodes, p), grid, _k0_quarter_symbol(p, -0.25))
    r = np.real(r)
    ref = _finalize_smatrix(grid, S_ref, theta_ref, theta_ref, r)
    if theta == theta_ref:
        return ref
    return ref.shift(theta)


# spec-facing alias
build_S_matrix = build_s_matrix


def log_det_factor(s: SMatrixResult) -> float:
    """(1/2) sum log(1 + lambda_n), the finite-mode determinant surrogate."""
    lam = s.eigenvalues
    if np.any(1.0 + lam <= 0.0):
        worst = float(np.min(1.0 + lam))
        raise ValueError(
            f"log-det undefined: min(1 + lambda) = {worst:.3e} <= 0 "
            f"(theta={s.theta:g} too small or grid artifact)"
        )
    return float(0.5 * np.sum(np.log1p(lam)))


# ---------------------------------------------------------------------------
# zero-point discrepancy

@dataclass
class ZeroPointResult:
    """Mismatch between the local Wick constant and the smeared pairing.

    Three readings, from strongest to weakest cancellation:

    * ``signed``: the plain integral of the mismatch density.  It vanishes
      identically (a rigid translation does not change int sech^2), so this
      is a pure quadrature-noise check.
    * ``density_l1``: L1 norm of the pointwise density.  For an even
      mollifier the O(1/kappa) term cancels and this decays like
      log(kappa)/kappa^2.
    * ``value``: the triangle-inequality evaluation of the same expression
      (absolute values inside all integrals), the quantity whose
      O(log(kappa)/kappa) decay rate is sharp.
    """

    kappa: float
    value: float
    density_l1: float
    signed: float
    density: np.ndarray = field(repr=False)
    grid: Grid = field(repr=False)

    def __float__(self):
        return self.value


def _halfcov_q_quadrature(mol: Mollifier, p: ModelParams, kappa: float):
    """Panels in u = q/kappa for integrals weighted by hat(u)/(2 omega_q)."""
    um = 2.0 * p.m / kappa
    edges = sorted(set([0.0] + [um * s for s in (0.25, 0.5, 1.0, 2.0, 4.0) if um * s < 0.25]
                       + [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 30.0, 45.0, 60.0]))
    t, w = np.polynomial.legendre.leggauss(32)
    us, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        c, hw = 0.5 * (a + b), 0.5 * (b - a)
        us.append(c + hw * t)
        ws.append(hw * w)
    u = np.concatenate(us)
    wq = np.concatenate(ws) * kappa  # du -> dq
    return u, wq


def zero_point_discrepancy(mol: Mollifier, kappa: float, grid: Grid, p: ModelParams) -> ZeroPointResult:
    """Zero-point bookkeeping discrepancy at cutoff kappa.

    density(x) = 6 m^2 [gamma_kappa sech^2(mx) - PAIR(x)] where PAIR is the
    smeared coincident-point pairing with sech^2 riding on one leg only.
    Both terms integrate to 12 m gamma_kappa, so the signed integral vanishes;
    the pointwise mismatch decays like log(kappa)/kappa and is returned as an
    L1 norm.
    """
    if not kappa > p.m:
        raise ValueError("kappa must exceed the mass scale")
    m = p.m
    qint, tw, bump = _pairing_w_profile(mol, p, kappa)
    x = grid.nodes
    s_x = sech(m * x) ** 2
    # s(x + w/kappa) sampled on (x, w) nodes
    s_shift = sech(m * (x[:, None] + tw[None, :] / kappa)) ** 2
    pref = 6.0 * m * m / np.sqrt(2.0 * np.pi)
    dens = pref * (((s_x[:, None] - s_shift) * bump[None, :]) @ qint)
    signed = float(grid.integrate(dens))
    density_l1 = float(grid.integrate(np.abs(dens)))
    # triangle-inequality evaluation: |cos| <= 1 inside the q-integral
    u, wq = _halfcov_q_quadrature(mol, p, kappa)
    iq = 2.0 * float(np.sum(wq * np.abs(mol.fourier(u)) / (2.0 * np.sqrt((kappa * u) ** 2 + 4.0 * m * m))))
    iw = float(grid.integrate(np.abs(s_x[:, None] - s_shift) @ bump))
    value = pref * iq * iw
    return ZeroPointResult(
        kappa=float(kappa), value=value, density_l1=density_l1, signed=signed, density=dens, grid=grid
    )


def _pairing_w_profile(mol: Mollifier, p: ModelParams, kappa: float):
    """Full-line q-integral int hat(q/kappa) cos(q w/kappa) / (2 omega_q) dq
    on the bump's Gauss-Legendre w-nodes, plus those nodes and weights."""
    m = p.m
    u, wq = _halfcov_q_quadrature(mol, p, kappa)  # u > 0 half-line
    hat = mol.fourier(u)
    om = np.sqrt((kappa * u) ** 2 + 4.0 * m * m)
    tw, ww = np.polynomial.legendre.leggauss(64)
    bump = mol.profile(tw) * ww
    cosqw = np.cos(np.outer(u, tw))  # q * (w/kappa) = u * w
    qint = 2.0 * ((wq * hat / (2.0 * om)) @ cosqw)  # even integrand: 2x half-line
    return qint, tw, bump


def zero_point_density_direct(mol: Mollifier, kappa: float, grid: Grid, p: ModelParams) -> np.ndarray:
    """Independent route: gamma_kappa s(x) minus the separately assembled pairing
    (no difference form; gamma_kappa from its own adaptive quadrature)."""
    m = p.m
    gam = gamma_kappa(mol, p, kappa)
    qint, tw, bump = _pairing_w_profile(mol, p, kappa)
    x = grid.nodes
    s_shift = sech(m * (x[:, None] + tw[None, :] / kappa)) ** 2
    pair = ((s_shift * bump[None, :]) @ qint) / np.sqrt(2.0 * np.pi)
    return 6.0 * m * m * (gam * sech(m * x) ** 2 - pair)


# ---------------------------------------------------------------------------
# consistency of the two field regularizations (bilinear-form surrogates)

def sech2_fourier(v, p: ModelParams):
    """int sech^2(mx) e^{ivx} dx = pi v / (m^2 sinh(pi v / 2m)), value 2/m at 0."""
    v = np.asarray(v, dtype=float)
    m = p.m
    arg = np.pi * v / (2.0 * m)
    small = np.abs(arg) < 1e-8
    safe = np.where(small, 1.0, arg)
    out = (np.pi * v / (m * m)) / np.where(small, 1.0, np.sinh(safe))
    return np.where(small, 2.0 / m, out)


def regularization_defect_form(
    f_k,
    g_k,
    mol: Mollifier,
    kappa: float,
    kgrid: MomentumGrid,
    p: ModelParams,
    channel: str = "number",
) -> complex:
    """One-particle matrix element of the difference between the two natural
    regularizations of the sech^2-weighted quadratic form.

    Smearing both fields at x (local route) versus smearing one field and
    convolving the product (composite route) leaves the defect kernel

        -6 m^2 S(q - q') (mu(q) - mu(q'))^2 / (4 pi sqrt(omega_q omega_q'))

    in the particle-number-conserving channel (``channel='number'``), with
    mu(q) = sqrt(2 pi) hat(q/kappa) and S the transform of sech^2.  The
    pair-creation channel (``channel='pair'``) replaces S(q-q') by S(q+q').
    Either form vanishes as kappa -> oo for Schwartz data, within the
    O(log kappa / kappa) envelope.
    """
    f_k = np.asarray(f_k, dtype=complex)
    g_k = np.asarray(g_k, dtype=complex)
    q = kgrid.nodes
    om = p.omega(q)
    mu = np.sqrt(2.0 * np.pi) * mol.fourier(q / kappa)
    sign = 1.0 if channel == "number" else -1.0
    if channel not in ("number", "pair"):
        raise ValueError("channel must be 'number' or 'pair'")
    v = q[:, None] - sign * q[None, :]
    kern = (
        -6.0 * p.m**2
        * sech2_fourier(v, p)
        * (mu[:, None] - mu[None, :]) ** 2
        / (4.0 * np.pi * np.sqrt(om[:, None] * om[None, :]))
    )
    return complex((np.conjugate(f_k) * kgrid.weights) @ kern @ (g_k * kgrid.weights))


# ---------------------------------------------------------------------------
# Wick-calculus counter-term identity (c-number level)

def wick_power(phi, n: int, gamma: float):
    """Normal-ordered power of a c-number field sample at Wick constant gamma."""
    phi = np.asarray(phi, dtype=float)
    if n == 1:
        return phi
    if n == 2:
        return phi**2 - gamma
    if n == 3:
        return phi**3 - 3.0 * gamma * phi
    if n == 4:
        return phi**4 - 6.0 * gamma * phi**2 + 3.0 * gamma**2
    raise ValueError("wick powers implemented for n = 1..4")


def counter_term_density(phi, gamma: float, k0half_diag: float, p: ModelParams):
    """Vacuum-sector counter-term density evaluated on c-number samples:
    -3 g^2 gamma phi^2 - 6 m g gamma phi - (1/2) K0half(x,x) + (3/2) g^2 gamma^2."""
    phi = np.asarray(phi, dtype=float)
    g, m = p.g, p.m
    return -3.0 * g * g * gamma * phi**2 - 6.0 * m * g * gamma * phi - 0.5 * k0half_diag + 1.5 * g * g * gamma**2
