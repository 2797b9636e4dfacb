"""Oscillatory quadrature helpers.

Two tools live here:

* a Filon-type panel rule that integrates ``f(k) exp(i k x)`` exactly in the
  phase once the smooth factor is replaced by its Legendre interpolant on
  each panel (moments are spherical Bessel functions), and
* the slowly decaying kernel moments
  ``I_j(z) = int k^j exp(ikz) / ((k^2+m^2)(k^2+4m^2)^(3/2)) dk``
  evaluated over the whole line with QUADPACK's oscillatory machinery.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.linalg import toeplitz
from scipy.special import spherical_jn

from .params import gauss_panels

__all__ = ["gauss_panels", "filon_panels", "ij_integral", "ij_toeplitz"]


def filon_panels(f, edges, x, order: int = 16):
    """Integrate f(k) e^{ikx} over the union of panels, vectorized over x.

    ``f`` is sampled at the Gauss-Legendre nodes of each panel and expanded in
    Legendre polynomials; the oscillatory moments
    ``int_-1^1 P_n(t) e^{iwt} dt = 2 i^n j_n(w)`` are exact, so accuracy is
    limited only by the smoothness of ``f`` on each panel, not by ``|x|``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    edges = np.asarray(edges, dtype=float)
    t, w = np.polynomial.legendre.leggauss(order)
    # Legendre-coefficient analysis operator on the reference panel
    P = np.polynomial.legendre.legvander(t, order - 1)  # (order, order)
    coeff_op = (P * w[:, None]).T * (np.arange(order) + 0.5)[:, None]  # (deg, node)
    out = np.zeros(x.shape, dtype=complex)
    ns = np.arange(order)
    for a, b in zip(edges[:-1], edges[1:]):
        c, hw = 0.5 * (a + b), 0.5 * (b - a)
        fv = np.asarray(f(c + hw * t), dtype=complex)
        coeffs = coeff_op @ fv  # (deg,)
        wphase = hw * x  # (nx,)
        moments = 2.0 * (1j**ns)[None, :] * spherical_jn(ns[None, :], np.abs(wphase)[:, None])
        # j_n(-w) = (-1)^n j_n(w)
        neg = wphase < 0
        moments[neg] *= (-1.0) ** ns[None, :]
        out += hw * np.exp(1j * c * x) * (moments @ coeffs)
    return out[0] if out.size == 1 and np.isscalar(x) else out


def _ij_density(k, j, m, b):
    return k**j / ((k * k + m * m) * (k * k + 4.0 * m * m) ** b)


@lru_cache(maxsize=200_000)
def _ij_scalar(j: int, z: float, m: float, b: float) -> complex:
    """I_j at a single separation z; even j are real, odd j purely imaginary."""
    if j < 0 or j > 4:
        raise ValueError("kernel moments implemented for j = 0..4")
    even = j % 2 == 0
    if z == 0.0:
        if not even:
            return 0.0j
        val, _ = quad(_ij_density, 0, np.inf, args=(j, m, b), limit=400)
        return complex(2.0 * val)
    weight = "cos" if even else "sin"
    val, _ = quad(
        _ij_density,
        0,
        np.inf,
        args=(j, m, b),
        weight=weight,
        wvar=abs(z),
        limlst=400,
        limit=400,
    )
    if even:
        return complex(2.0 * val)
    return 2j * val * np.sign(z)


def ij_integral(j: int, z, m: float, b: float = 1.5):
    """Kernel moment I_j(z) over the full line (vectorized in z)."""
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.array([_ij_scalar(int(j), float(round(zz, 14)), float(m), float(b)) for zz in zs])
    return out[0] if np.isscalar(z) else out


def ij_toeplitz(j: int, nodes: np.ndarray, m: float, b: float = 1.5) -> np.ndarray:
    """Matrix I_j(x_i - x_j) for a uniform grid, via one row of moments.

    Uses I_j(-z) = (-1)^j I_j(z) (conjugate-symmetric for odd j).
    """
    z = nodes - nodes[0]
    col = ij_integral(j, z, m, b)  # I_j(z_d) for z_d = d*h >= 0
    row = col * (-1.0) ** j  # I_j(-z_d)
    return toeplitz(col, row)  # [i, j] = I_j(x_i - x_j)
