"""Forward/inverse distorted Fourier transform and wave/scattering operators.

Expansion in the generalized eigenfunctions E_k of the kink fluctuation
operator instead of plane waves.  The continuum normalization is
``<E_l, E_k> = 2 pi delta(k - l)``, so

    forward:  u_tilde(k) = (2 pi)^{-1/2} int conj(E_k(x)) U(x) dx
    inverse:  U(x) = c0 psi0 + c1 psi1 + (2 pi)^{-1/2} int E_k(x) u_tilde(k) dk

and Parseval reads ||U||^2 = c0^2 + c1^2 + ||u_tilde||^2_{L^2(dk)}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import Grid, ModelParams, MomentumGrid, momentum_grid
from .spectral_core import eigenfunction_matrix, psi0, psi1, scattering_phase

__all__ = [
    "SpectralCoefficients",
    "DistortedTransform",
    "forward",
    "inverse",
    "wave_operator_adjoint",
    "scattering_operator",
]

_SQRT2PI = np.sqrt(2.0 * np.pi)


@dataclass
class SpectralCoefficients:
    """Discrete-mode coefficients plus the continuum transform on a k-grid."""

    c0: float
    c1: float
    u_tilde: np.ndarray = field(repr=False)
    kgrid: MomentumGrid = field(repr=False)
    warnings: list = field(default_factory=list)

    def norm_squared(self) -> float:
        return float(self.c0**2 + self.c1**2 + self.kgrid.integrate(np.abs(self.u_tilde) ** 2))


class DistortedTransform:
    """Precomputed eigenfunction samples tying one position grid to one k-grid."""

    def __init__(self, grid: Grid, kgrid: MomentumGrid, p: ModelParams):
        self.grid = grid
        self.kgrid = kgrid
        self.p = p
        self.psi0 = psi0(grid.nodes, p)
        self.psi1 = psi1(grid.nodes, p)
        # rows: momentum nodes, columns: position nodes
        self.E = eigenfunction_matrix(kgrid.nodes, grid.nodes, p)

    def forward(self, U) -> SpectralCoefficients:
        U = np.asarray(U)
        warnings = []
        boundary = max(abs(complex(U[0])), abs(complex(U[-1])))
        scale = float(np.max(np.abs(U))) or 1.0
        if boundary > 1e-8 * scale:
            warnings.append(
                f"input does not decay at the grid boundary (|U(edge)|/max|U| = {boundary / scale:.2e}); "
                "continuum coefficients may be aliased"
            )
        wx = self.grid.weights
        c0 = float(np.real(np.dot(self.psi0 * wx, U)))
        c1 = float(np.real(np.dot(self.psi1 * wx, U)))
        u_tilde = (np.conjugate(self.E) @ (wx * U)) / _SQRT2PI
        return SpectralCoefficients(c0=c0, c1=c1, u_tilde=u_tilde, kgrid=self.kgrid, warnings=warnings)

    def inverse(self, s: SpectralCoefficients):
        vals = np.asarray(s.u_tilde) * s.kgrid.weights
        cont = (vals @ self.E) / _SQRT2PI
        return s.c0 * self.psi0 + s.c1 * self.psi1 + cont

    def continuum_projection(self, U):
        """U minus its bound-state components (range of the partial isometry)."""
        U = np.asarray(U)
        wx = self.grid.weights
        return U - self.psi0 * np.dot(self.psi0 * wx, U) - self.psi1 * np.dot(self.psi1 * wx, U)


def forward(U, grid: Grid, kgrid: MomentumGrid, p: ModelParams) -> SpectralCoefficients:
    return DistortedTransform(grid, kgrid, p).forward(U)


def inverse(s: SpectralCoefficients, grid: Grid, p: ModelParams):
    return DistortedTransform(grid, s.kgrid, p).inverse(s)


def scattering_operator(g, kgrid: MomentumGrid, p: ModelParams):
    """Multiply by the unimodular factor exp(+2i delta_k) (k>0) / exp(-2i delta_k) (k<0)."""
    d = scattering_phase(kgrid.nodes, p)
    s = np.where(kgrid.nodes < 0, -1.0, 1.0)
    return np.exp(2j * s * d) * np.asarray(g)


def wave_operator_adjoint(sign: str, f, kgrid: MomentumGrid, grid: Grid, p: ModelParams):
    """Adjoint wave-operator actions on a momentum-space function.

    '+' maps f to its plain inverse-Fourier integral int f(k) e^{ikx} dk;
    '-' additionally twists by the squared transmission phase on each
    half-line.  No 2 pi normalization: these are the literal integral
    actions, so the L^2 scaling is ||out|| = sqrt(2 pi) ||f||.
    """
    f = np.asarray(f, dtype=complex)
    if sign == "+":
        mult = f
    elif sign == "-":
        d = scattering_phase(kgrid.nodes, p)
        s = np.where(kgrid.nodes < 0, -1.0, 1.0)
        mult = f * np.exp(2j * s * d)
    else:
        raise ValueError("sign must be '+' or '-'")
    phases = np.exp(1j * np.outer(grid.nodes, kgrid.nodes))
    return phases @ (mult * kgrid.weights)
