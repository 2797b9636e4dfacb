"""Model constants and discretization grids.

Everything downstream is expressed in terms of the two positive couplings
``m`` (mass scale) and ``g`` (quartic coupling), plus derived scales:
the vacuum value ``phi0 = m/g``, the classical kink rest mass
``m_cl = 4 m^3 / 3`` (times ``1/g^2`` for the full mass ``M_cl``), and the
internal oscillation frequency ``omega_d = sqrt(3) m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridResolutionError(RuntimeError):
    """Raised when a requested operation cannot be resolved on the given grid."""


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the double-well scalar model."""

    m: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and np.isfinite(self.m)):
            raise ValueError(f"mass scale m must be positive, got {self.m}")
        if not (self.g > 0 and np.isfinite(self.g)):
            raise ValueError(f"coupling g must be positive, got {self.g}")

    @property
    def phi0(self) -> float:
        return self.m / self.g

    @property
    def m_cl(self) -> float:
        return 4.0 * self.m**3 / 3.0

    @property
    def M_cl(self) -> float:
        return self.m_cl / self.g**2

    @property
    def omega_d(self) -> float:
        return np.sqrt(3.0) * self.m

    def omega(self, k):
        """Dispersion relation sqrt(k^2 + 4 m^2) of the elementary bosons."""
        return np.sqrt(np.asarray(k, dtype=float) ** 2 + 4.0 * self.m**2)


@dataclass(frozen=True)
class Grid:
    """Uniform symmetric position grid with trapezoid quadrature weights.

    The default extent m*x_max = 20 keeps sech^2(m*x_max) ~ 2e-17, so all
    bound-state and kernel integrands are resolved to roundoff at the ends.
    """

    x_max: float
    n: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid needs at least 8 points")
        if not self.x_max > 0:
            raise ValueError("x_max must be positive")
        nodes = np.linspace(-self.x_max, self.x_max, self.n)
        w = np.full(self.n, nodes[1] - nodes[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)

    @property
    def x_min(self) -> float:
        return -self.x_max

    @property
    def h(self) -> float:
        return 2.0 * self.x_max / (self.n - 1)

    def integrate(self, f: np.ndarray):
        """Trapezoid quadrature along the last axis."""
        return np.tensordot(np.asarray(f), self.weights, axes=([-1], [0]))

    def dot(self, f: np.ndarray, g: np.ndarray):
        """L^2 inner product <f, g> with the first argument conjugated."""
        return self.integrate(np.conjugate(f) * g)

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(np.real(self.dot(f, f))))


def default_grid(p: ModelParams, n: int = 4096, x_factor: float = 20.0) -> Grid:
    """Default position grid: m*x_max = 20, n = 4096, trapezoid weights."""
    return Grid(x_max=x_factor / p.m, n=n)


def gauss_panels(edges, order: int = 16):
    """Composite Gauss-Legendre nodes/weights on the panels given by `edges`."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("panel edges must be strictly increasing")
    t, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        c, hw = 0.5 * (a + b), 0.5 * (b - a)
        nodes.append(c + hw * t)
        weights.append(hw * w)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class MomentumGrid:
    """Composite Gauss-Legendre momentum grid, symmetric about k = 0."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    k_max: float = 0.0

    def __post_init__(self):
        k, w = np.asarray(self.nodes, float), np.asarray(self.weights, float)
        if np.any(np.diff(k) <= 0):
            raise ValueError("momentum nodes must be strictly increasing")
        if np.any(w <= 0):
            raise ValueError("momentum weights must be positive")
        # symmetry about zero within roundoff of the panel construction
        if not np.allclose(k, -k[::-1], atol=1e-12 * max(1.0, abs(k[-1]))):
            raise ValueError("momentum grid must be symmetric about 0")
        object.__setattr__(self, "nodes", k)
        object.__setattr__(self, "weights", w)
        if not self.k_max:
            object.__setattr__(self, "k_max", float(abs(k[-1])))

    @property
    def n(self) -> int:
        return self.nodes.size

    def integrate(self, f: np.ndarray):
        return np.tensordot(np.asarray(f), self.weights, axes=([-1], [0]))


def momentum_grid(
    p: ModelParams,
    k_max: float | None = None,
    order: int = 24,
    max_panel: float | None = None,
) -> MomentumGrid:
    """Momentum grid for continuum-mode sums, denser near k = 0.

    The scattering phase varies on the scale m around the origin, hence the
    fine core panels.  Panel widths are capped at ``max_panel`` so that the
    oscillation of exp(ikx) over one panel stays resolved by the panel order
    for |x| up to the default grid extent (20/m).
    """
    if k_max is None:
        k_max = 40.0 * p.m
    if k_max <= 4.0 * p.m:
        raise ValueError("k_max should exceed a few mass units")
    if max_panel is None:
        max_panel = 2.0 * p.m
    core = np.array([0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0]) * p.m
    core = core[core < k_max]
    tail = np.arange(core[-1] + max_panel, k_max, max_panel)
    edges_pos = np.concatenate([core, tail, [k_max]])
    edges_pos = np.unique(edges_pos)
    edges = np.concatenate([-edges_pos[::-1], edges_pos[1:]])
    nodes, weights = gauss_panels(edges, order=order)
    return MomentumGrid(nodes=nodes, weights=weights, k_max=float(k_max))
