"""Truncated bosonic Fock space over the kink mode set, and its dynamics.

The mode set is the discrete oscillation mode (frequency sqrt(3) m) plus
finitely many continuum modes placed at Gauss-Legendre momentum nodes, with
the quadrature weights absorbed into operator kernels so that finite sums
stand in for dk-integrals.  On the resulting occupation basis (total number
capped) the canonical commutation relations hold exactly below the cap, every
Wick operator is a finite matrix, and the number-weighted norm bound
``||(1+N)^{-m/2} W_w (1+N)^{-n/2}|| <= ||w||`` can be checked literally.

The collective-coordinate leg stays factored: quadratic evolution rotates the
occupation amplitudes by mode phases while the packet label evolves through
the closed-form spreading of :mod:`kinkspec.wavepackets`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .mollifier import Mollifier, gamma_kappa
from .params import Grid, ModelParams, MomentumGrid, gauss_panels, momentum_grid
from .spectral_core import (
    eigenfunction_values,
    psi0,
    psi1,
    sech,
    smeared_eigenfunction_matrix,
)
from .wavepackets import WavePacket, chi_eval

__all__ = [
    "ModeSet",
    "modeset_from_gl",
    "FockSpace",
    "TruncatedFockState",
    "WickKernel",
    "apply_creation",
    "apply_annihilation",
    "number_operator",
    "apply_wick",
    "wick_matrix",
    "weighted_wick_norm",
    "kernel_norm",
    "quadratic_evolution",
    "InteractionTerm",
    "build_interaction_kernels",
    "linearized_classical_evolution",
    "zero_mode_growth_ratio",
    "zero_mode_norms",
    "duhamel_comparison",
]


# ---------------------------------------------------------------------------
# mode set and occupation basis

@dataclass(frozen=True)
class ModeSet:
    """Discrete mode (index 0) plus continuum modes at momentum nodes.

    ``weights`` are the quadrature weights of the continuum nodes; mode
    operators a_i correspond to sqrt(w_i) a(k_i), so [a_i, a_j^+] = delta_ij.
    """

    p: ModelParams
    k_nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.k_nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if k.size != w.size or np.any(w <= 0):
            raise ValueError("continuum nodes and positive weights must match")
        if np.unique(k).size != k.size:
            raise ValueError("modes must be distinct")
        object.__setattr__(self, "k_nodes", k)
        object.__setattr__(self, "weights", w)

    @property
    def n_modes(self) -> int:
        return 1 + self.k_nodes.size

    @property
    def frequencies(self) -> np.ndarray:
        return np.concatenate([[self.p.omega_d], self.p.omega(self.k_nodes)])


def modeset_from_gl(p: ModelParams, M: int, k_max: float | None = None) -> ModeSet:
    """M continuum modes at Gauss-Legendre nodes on [-k_max, k_max]."""
    if k_max is None:
        k_max = 3.0 * p.m
    t, w = np.polynomial.legendre.leggauss(M)
    return ModeSet(p=p, k_nodes=k_max * t, weights=k_max * w)


class FockSpace:
    """Occupation basis with total-number cap, graded-lexicographic order."""

    def __init__(self, modes: ModeSet, n_max: int):
        if n_max < 0:
            raise ValueError("occupation cap must be >= 0")
        self.modes = modes
        self.n_max = n_max
        nm = modes.n_modes
        basis = []
        for total in range(n_max + 1):
            for occ in _compositions(total, nm):
                basis.append(occ)
        self.basis = basis
        self.index = {occ: i for i, occ in enumerate(basis)}
        self.dim = len(basis)
        self.totals = np.array([sum(occ) for occ in basis])

    def vacuum(self) -> "TruncatedFockState":
        amp = np.zeros(self.dim, dtype=complex)
        amp[self.index[(0,) * self.modes.n_modes]] = 1.0
        return TruncatedFockState(space=self, amplitudes=amp)

    def basis_state(self, occ) -> "TruncatedFockState":
        amp = np.zeros(self.dim, dtype=complex)
        amp[self.index[tuple(occ)]] = 1.0
        return TruncatedFockState(space=self, amplitudes=amp)


def _compositions(total: int, parts: int):
    """All occupation tuples with the given total, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass
class TruncatedFockState:
    space: FockSpace = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)
    dropped_norm2: float = 0.0  # probability shed past the occupation cap

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "TruncatedFockState":
        return TruncatedFockState(self.space, self.amplitudes.copy(), self.dropped_norm2)


def _ladder_matrix(space: FockSpace, mode: int, create: bool):
    """Sparse matrix of a_mode^+ (create) or a_mode on the truncated basis."""
    rows, cols, vals = [], [], []
    for i, occ in enumerate(space.basis):
        n_i = occ[mode]
        if create:
            if sum(occ) + 1 > space.n_max:
                continue  # amplitude dropped past the cap
            tgt = occ[:mode] + (n_i + 1,) + occ[mode + 1:]
            rows.append(space.index[tgt])
            cols.append(i)
            vals.append(np.sqrt(n_i + 1.0))
        else:
            if n_i == 0:
                continue
            tgt = occ[:mode] + (n_i - 1,) + occ[mode + 1:]
            rows.append(space.index[tgt])
            cols.append(i)
            vals.append(np.sqrt(float(n_i)))
    return sp.csr_matrix((vals, (rows, cols)), shape=(space.dim, space.dim))


def apply_creation(mode: int, state: TruncatedFockState) -> TruncatedFockState:
    """a_mode^+ with overflow amplitudes dropped (and accounted, not raised)."""
    space = state.space
    mat = _ladder_cache(space)["create"][mode]
    new = mat @ state.amplitudes
    # norm that the untruncated operator would have produced
    full = np.sum((np.array([occ[mode] for occ in space.basis]) + 1.0) * np.abs(state.amplitudes) ** 2)
    dropped = float(max(full - np.linalg.norm(new) ** 2, 0.0))
    return TruncatedFockState(space, new, state.dropped_norm2 + dropped)


def apply_annihilation(mode: int, state: TruncatedFockState) -> TruncatedFockState:
    space = state.space
    mat = _ladder_cache(space)["annihilate"][mode]
    return TruncatedFockState(space, mat @ state.amplitudes, state.dropped_norm2)


def _ladder_cache(space: FockSpace):
    cache = getattr(space, "_ladders", None)
    if cache is None:
        nm = space.modes.n_modes
        cache = {
            "create": [_ladder_matrix(space, i, True) for i in range(nm)],
            "annihilate": [_ladder_matrix(space, i, False) for i in range(nm)],
        }
        space._ladders = cache
    return cache


def number_operator(space: FockSpace) -> sp.csr_matrix:
    return sp.diags(space.totals.astype(float)).tocsr()


# ---------------------------------------------------------------------------
# Wick operators

@dataclass
class WickKernel:
    """Kernel of a normal-ordered operator with m_out creators, n_in annihilators.

    ``array`` has shape modes^(m_out+n_in); it is symmetrized separately in
    the outgoing and incoming slots on construction.
    """

    m_out: int
    n_in: int
    array: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        arr = np.asarray(self.array, dtype=complex)
        if arr.ndim != self.m_out + self.n_in:
            raise ValueError("kernel rank must equal m_out + n_in")
        if not np.all(np.isfinite(arr)):
            raise ValueError("kernel entries must be finite")
        self.array = _symmetrize(arr, self.m_out, self.n_in)

    @property
    def norm(self) -> float:
        return kernel_norm(self)


def _symmetrize(arr: np.ndarray, m: int, n: int) -> np.ndarray:
    out = np.zeros_like(arr)
    perms_out = list(itertools.permutations(range(m)))
    perms_in = list(itertools.permutations(range(m, m + n)))
    for po in perms_out:
        for pi in perms_in:
            out += np.transpose(arr, po + pi)
    return out / (len(perms_out) * len(perms_in))


def kernel_norm(wk: WickKernel) -> float:
    """Operator norm of the kernel as a map Sym^n -> Sym^m.

    Computed on the full tensor space sandwiched between symmetrizers, which
    equals the symmetric-subspace norm because the kernel is already
    slot-symmetric.
    """
    nm = wk.array.shape[0] if wk.array.ndim else 1
    m, n = wk.m_out, wk.n_in
    if m + n == 0:
        return float(abs(wk.array))
    mat = wk.array.reshape(nm**m if m else 1, nm**n if n else 1)
    return float(np.linalg.norm(mat, 2))


def wick_matrix(wk: WickKernel, space: FockSpace) -> sp.csr_matrix:
    """Dense action sum a^+_{i_m}..a^+_{i_1} w[i.., j..] a_{j_1}..a_{j_n}."""
    cache = _ladder_cache(space)
    nm = space.modes.n_modes
    m, n = wk.m_out, wk.n_in
    total = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for idx_in in itertools.product(range(nm), repeat=n):
        ann = sp.identity(space.dim, format="csr", dtype=complex)
        # a_{j_1} ... a_{j_n} applied right to left
        for j in reversed(idx_in):
            ann = cache["annihilate"][j] @ ann
        w_slice = wk.array[(slice(None),) * m + idx_in] if m else wk.array[idx_in]
        for idx_out in itertools.product(range(nm), repeat=m):
            w = w_slice[idx_out] if m else w_slice
            if w == 0.0:
                continue
            cre = sp.identity(space.dim, format="csr", dtype=complex)
            for i in idx_out:  # a^+_{i_m} ... a^+_{i_1}
                cre = cache["create"][i] @ cre
            total = total + w * (cre @ ann)
    return total.tocsr()


def apply_wick(wk: WickKernel, state: TruncatedFockState) -> TruncatedFockState:
    mat = wick_matrix(wk, state.space)
    return TruncatedFockState(state.space, mat @ state.amplitudes, state.dropped_norm2)


def weighted_wick_norm(wk: WickKernel, space: FockSpace, a: float | None = None, b: float | None = None) -> float:
    """|| (1+N)^{-a/2} W_w (1+N)^{-b/2} || on the truncated space.

    Defaults a = m_out, b = n_in reproduce the basic estimate, whose right
    hand side is ``kernel_norm(wk)``.
    """
    a = wk.m_out if a is None else a
    b = wk.n_in if b is None else b
    W = wick_matrix(wk, space).toarray()
    d = (1.0 + space.totals.astype(float))
    M = (d ** (-a / 2.0))[:, None] * W * (d ** (-b / 2.0))[None, :]
    return float(np.linalg.norm(M, 2))


# ---------------------------------------------------------------------------
# quadratic evolution

def quadratic_evolution(state: TruncatedFockState, t: float, packet: WavePacket | None = None):
    """Diagonal phase rotation exp(-i t sum n_i omega_i) of the mode amplitudes.

    The collective-coordinate leg is returned as the same packet label: its
    wave function at time t is chi_n(t, .), already an exact solution of the
    free Schroedinger flow, so the tensor state is (rotated amplitudes) x
    chi_n(t).
    """
    freqs = state.space.modes.frequencies
    energies = np.array([float(np.dot(occ, freqs)) for occ in state.space.basis])
    new = state.amplitudes * np.exp(-1j * t * energies)
    evolved = TruncatedFockState(state.space, new, state.dropped_norm2)
    return (evolved, packet) if packet is not None else evolved


# ---------------------------------------------------------------------------
# interaction kernels

@dataclass
class InteractionTerm:
    """One Wick monomial of the transformed interaction: Q^q_power x W_kernel.

    ``scalar`` replaces the kernel when no mode legs remain (b = 0).  The
    full coefficient, including combinatorial factors, coupling constants and
    the (-sqrt(m_cl))^q_power from the collective leg, is already inside.
    """

    label: str
    q_power: int
    kernel: WickKernel | None = None
    scalar: float = 0.0


def _smeared_mode_legs(modes: ModeSet, grid: Grid, p: ModelParams, mol: Mollifier, kappa: float):
    """Leg functions L_i(x) entering every kernel contraction.

    L_0 = (delta_kappa * psi1)/sqrt(2 omega_d); for continuum mode i,
    L_i = sqrt(w_i / 2pi) (delta_kappa * E_{k_i}) / sqrt(2 omega_i).
    """
    x = grid.nodes
    legs = np.empty((modes.n_modes, grid.n), dtype=complex)
    legs[0] = mol.smear(lambda xx: psi1(xx, p), x, kappa) / np.sqrt(2.0 * p.omega_d)
    sm = smeared_eigenfunction_matrix(mol, kappa, modes.k_nodes, x, p)
    scale = np.sqrt(modes.weights / (2.0 * np.pi)) / np.sqrt(2.0 * p.omega(modes.k_nodes))
    legs[1:] = scale[:, None] * sm
    return legs


def delta_gamma(mol: Mollifier, kappa: float, grid: Grid, p: ModelParams,
                kgrid: MomentumGrid | None = None) -> np.ndarray:
    """delta-gamma_kappa(x) = gamma-tilde_kappa(x) - gamma_kappa.

    Both coincident-point variances diverge logarithmically, but the
    distorted-minus-plane-wave integrand decays like 1/k^3 once the two are
    subtracted under the same momentum window:

        dg(x) = (psi1 * delta_kappa)^2 / (2 omega_d)
                + (1/2pi) int [ |delta_kappa * E_k|^2 - 2 pi hat(k/kappa)^2 ]
                          / (2 omega_k) dk ,

    which stays uniformly bounded as the cutoff is removed.
    """
    if kgrid is None:
        kgrid = momentum_grid(p, k_max=40.0 * p.m, order=16)
    x = grid.nodes
    leg_d = mol.smear(lambda xx: psi1(xx, p), x, kappa)
    out = leg_d**2 / (2.0 * p.omega_d)
    om = p.omega(kgrid.nodes)
    hat2 = 2.0 * np.pi * mol.fourier(kgrid.nodes / kappa) ** 2
    sm = smeared_eigenfunction_matrix(mol, kappa, kgrid.nodes, x, p)
    diff = np.abs(sm) ** 2 - hat2[:, None]
    out = out + (kgrid.weights / (4.0 * np.pi * om)) @ diff
    return np.real(out)


def field_variance_profile(mol: Mollifier, kappa: float, grid: Grid, p: ModelParams,
                           kgrid: MomentumGrid | None = None) -> np.ndarray:
    """gamma-tilde_kappa(x) = gamma_kappa + delta_gamma(x), the coincident-point
    variance of the fluctuation field in the kink background."""
    return delta_gamma(mol, kappa, grid, p, kgrid=kgrid) + gamma_kappa(mol, p, kappa)


def _wick_kernels_for_power(b_weight: np.ndarray, legs: np.ndarray, power: int, grid: Grid, coeff: float, label: str):
    """Kernels of coeff * int b_weight(x) :phi~^power:(x) dx, split over (m, n).

    Annihilation legs contract with L_i, creation legs with conj(L_i); the
    binomial counts the normal orderings.
    """
    terms = []
    w = b_weight * grid.weights
    nm = legs.shape[0]
    for m_out in range(power + 1):
        n_in = power - m_out
        binom = factorial(power) // (factorial(m_out) * factorial(n_in))
        # arr[i_1..i_m, j_1..j_n] = int w conj(L_i..) L_j.. dx
        arr = np.empty((nm,) * power if power else (), dtype=complex)
        for idx in itertools.product(range(nm), repeat=power):
            prof = w.astype(complex)
            for pos, i in enumerate(idx):
                prof = prof * (np.conjugate(legs[i]) if pos < m_out else legs[i])
            val = np.sum(prof)
            if power:
                arr[idx] = val
            else:
                arr = val
        terms.append(InteractionTerm(
            label=f"{label}:phi^{power}({m_out},{n_in})",
            q_power=0,
            kernel=WickKernel(m_out=m_out, n_in=n_in, array=coeff * binom * arr,
                              label=f"{label}({m_out},{n_in})"),
        ))
    return terms


def build_interaction_kernels(
    b,
    modes: ModeSet,
    mol: Mollifier,
    kappa: float,
    grid: Grid,
    p: ModelParams,
    check_lower_bound: bool = False,
):
    """Wick-monomial kernels of the transformed cubic + quartic interaction.

    The fluctuation field splits as Y + phi~ with Y = -sqrt(m_cl) Q psi0(x);
    expanding the normal-ordered powers of the shifted field produces, for
    the cubic piece weighted by 2 m g b(x) tanh(mx),

        Y^3 + 3 Y^2 phi~ + 3 Y :phi~^2: + :phi~^3: + 3 dg phi~ + 3 Y dg,

    and for the quartic piece weighted by (g^2/2) b(x),

        Y^4 + 4 Y^3 phi~ + 6 Y^2 :phi~^2: + 4 Y :phi~^3: + :phi~^4:
        + 6 Y^2 dg + 12 Y dg phi~ - 6 dg :phi~^2: + 3 dg^2,

    where dg = delta_gamma_kappa(x).  Every x-integral is carried out here;
    what remains is a Q-power times a Wick kernel over the mode set (pure
    scalars are returned with q_power = 0 and kernel = None).
    """
    import warnings as _w

    b = np.asarray(b, dtype=float)
    x = grid.nodes
    m, g = p.m, p.g
    if check_lower_bound:
        floor = sech(m * x) ** 2
        ratio = b / floor
        if np.min(ratio) <= 0:
            _w.warn(
                "spatial cutoff fails the positivity surrogate b >= delta sech^2(mx); "
                "the semibounded regime is not guaranteed",
                stacklevel=2,
            )
    v0 = psi0(x, p)
    Y1 = -np.sqrt(p.m_cl) * v0  # x-profile of Y per power of Q
    legs = _smeared_mode_legs(modes, grid, p, mol, kappa)
    dg = delta_gamma(mol, kappa, grid, p)

    u3 = 2.0 * m * g * b * np.tanh(m * x)
    u4 = 0.5 * g * g * b

    terms: list[InteractionTerm] = []

    def scalar_term(label, q_power, weight):
        terms.append(InteractionTerm(label=label, q_power=q_power,
                                     scalar=float(grid.integrate(weight))))

    def wick_terms(label, q_power, weight, power, comb):
        for t in _wick_kernels_for_power(weight * (Y1**q_power), legs, power, grid, comb, label):
            t.q_power = q_power
            terms.append(t)

    # cubic: 2 m g b tanh * [...]
    scalar_term("cubic:Y^3", 3, u3 * Y1**3)
    wick_terms("cubic:", 2, u3, 1, 3.0)          # 3 Y^2 phi~
    wick_terms("cubic:", 1, u3, 2, 3.0)          # 3 Y :phi~^2:
    wick_terms("cubic:", 0, u3, 3, 1.0)          # :phi~^3:
    wick_terms("cubic:dg*", 0, u3 * 3.0 * dg, 1, 1.0)   # 3 dg phi~
    scalar_term("cubic:Y*dg", 1, u3 * 3.0 * dg * Y1)

    # quartic: (g^2/2) b * [...]
    scalar_term("quartic:Y^4", 4, u4 * Y1**4)
    wick_terms("quartic:", 3, u4, 1, 4.0)
    wick_terms("quartic:", 2, u4, 2, 6.0)
    wick_terms("quartic:", 1, u4, 3, 4.0)
    wick_terms("quartic:", 0, u4, 4, 1.0)
    scalar_term("quartic:Y^2*dg", 2, u4 * 6.0 * dg * Y1**2)
    wick_terms("quartic:dg*", 1, u4 * 12.0 * dg, 1, 1.0)
    wick_terms("quartic:dg*", 0, u4 * (-6.0) * dg, 2, 1.0)
    scalar_term("quartic:dg^2", 0, u4 * 3.0 * dg**2)

    ledger = {t.label: t.scalar for t in terms if t.kernel is None}
    return terms, ledger


# ---------------------------------------------------------------------------
# linearized classical dynamics (doubled first-order form)

def _multiplier(grid: Grid, p: ModelParams, power: float) -> np.ndarray:
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.h)
    return (k * k + 4.0 * p.m**2) ** power


def _apply_mult(u: np.ndarray, mult: np.ndarray) -> np.ndarray:
    return np.fft.ifft(mult * np.fft.fft(u))


@dataclass
class LinearFlowResult:
    times: np.ndarray
    alpha: np.ndarray = field(repr=False)  # (nt, n)
    alpha_bar: np.ndarray = field(repr=False)
    pseudo_unitarity_defect: float = 0.0
    grid: Grid = field(repr=False, default=None)


def linearized_classical_evolution(
    alpha0,
    alpha_bar0,
    t_eval,
    grid: Grid,
    p: ModelParams,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> LinearFlowResult:
    """Integrate the doubled first-order flow of the fluctuation equation.

        d(alpha)/dt     = -i K0^(1/2) alpha     - (i/2) K0^(-1/4) V K0^(-1/4) (alpha + alpha_bar)
        d(alpha_bar)/dt = +i K0^(1/2) alpha_bar + (i/2) K0^(-1/4) V K0^(-1/4) (alpha + alpha_bar)

    with V = -6 m^2 sech^2(mx).  The indefinite form ||alpha||^2 -
    ||alpha_bar||^2 is conserved (pseudo-unitarity); its drift over the run
    is reported as the defect.  The zero mode produces the exact linearly
    growing solution t K0^(1/4) psi0 + i K0^(-1/4) psi0.
    """
    n = grid.n
    half = _multiplier(grid, p, 0.5)
    mquart = _multiplier(grid, p, -0.25)
    V = -6.0 * p.m**2 * sech(p.m * grid.nodes) ** 2

    def rhs(t, y):
        a = y[:n]
        ab = y[n:]
        coupling = _apply_mult(V * _apply_mult(a + ab, mquart), mquart)
        da = -1j * _apply_mult(a, half) - 0.5j * coupling
        dab = 1j * _apply_mult(ab, half) + 0.5j * coupling
        return np.concatenate([da, dab])

    y0 = np.concatenate([np.asarray(alpha0, complex), np.asarray(alpha_bar0, complex)])
    t_eval = np.asarray(t_eval, dtype=float)
    sol = solve_ivp(rhs, (t_eval[0], t_eval[-1]), y0, t_eval=t_eval, method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"linear flow integrator failed: {sol.message}")
    a = sol.y[:n].T
    ab = sol.y[n:].T
    form = np.sum(np.abs(a) ** 2, axis=1) * grid.h - np.sum(np.abs(ab) ** 2, axis=1) * grid.h
    scale = max(abs(form[0]), grid.h * float(np.sum(np.abs(y0) ** 2)))
    defect = float(np.max(np.abs(form - form[0])) / scale)
    return LinearFlowResult(times=t_eval, alpha=a, alpha_bar=ab,
                            pseudo_unitarity_defect=defect, grid=grid)


def hilbert_schmidt_offdiagonal(p: ModelParams, k_max: float = 60.0) -> float:
    """The 2-D integral int |V_hat(k-l)|^2 / (omega_k omega_l) dk dl whose
    finiteness licenses unitary implementability of the linear flow."""
    m = p.m
    kn, kw = gauss_panels(np.linspace(-k_max * m, k_max * m, 121), order=8)

    def vhat2(q):
        # |FT(-6 m^2 sech^2(mx))|^2 with the unitary convention
        amp = 6.0 * m * m * np.pi * q / (m * m * np.sinh(np.pi * q / (2.0 * m)) + 1e-300) / np.sqrt(2 * np.pi)
        amp = np.where(np.abs(q) < 1e-8, 6.0 * m * m * (2.0 / m) / np.sqrt(2 * np.pi), amp)
        return amp * amp

    om = p.omega(kn)
    q = kn[:, None] - kn[None, :]
    integrand = vhat2(q) / (om[:, None] * om[None, :])
    return float(kw @ integrand @ kw)


def zero_mode_norms(p: ModelParams) -> tuple[float, float]:
    """(||K0^(-1/4) psi0||, ||K0^(1/4) psi0||) by momentum quadrature of the
    analytic transform of sech^2."""
    m = p.m

    def hat0_sq(k):
        amp = np.sqrt(0.75 * m) * np.pi * k / (m * m * np.sinh(np.pi * k / (2.0 * m)) + 1e-300) / np.sqrt(2 * np.pi)
        amp = np.where(np.abs(k) < 1e-8, np.sqrt(0.75 * m) * (2.0 / m) / np.sqrt(2 * np.pi), amp)
        return amp * amp

    kn, kw = gauss_panels(np.linspace(0.0, 60.0 * m, 61), order=12)
    om = p.omega(kn)  # squared quarter-power multipliers weigh by 1/omega, omega
    lo = 2.0 * float(np.dot(kw, hat0_sq(kn) / om))
    hi = 2.0 * float(np.dot(kw, hat0_sq(kn) * om))
    return float(np.sqrt(lo)), float(np.sqrt(hi))


def zero_mode_growth_ratio(t: float, p: ModelParams) -> float:
    """||a^+(K0^(-1/4) psi0, t) vacuum|| / t from the closed one-particle form
    sqrt(a^2 + t^2 b^2)/t with a, b the norms of K0^(-+1/4) psi0; tends to b."""
    if not t > 0:
        raise ValueError("t must be positive")
    a, b = zero_mode_norms(p)
    return float(np.sqrt(a * a + t * t * b * b) / t)


# ---------------------------------------------------------------------------
# Duhamel comparison experiment

@dataclass
class DuhamelRow:
    g: float
    t1: float
    sup_distance: float
    envelope: float


def _q_ladder(n_q: int):
    a = np.diag(np.sqrt(np.arange(1, n_q)), 1)  # annihilation in He-basis
    return a, a.T


def duhamel_comparison(
    gs=(0.2, 0.1, 0.05),
    p: ModelParams | None = None,
    M: int = 2,
    n_max: int = 4,
    n_q: int = 10,
    kappa: float = 100.0,
    grid: Grid | None = None,
    nt: int = 33,
):
    """Distance between interacting and free truncated evolutions.

    For each coupling, evolve the ground packet x Fock vacuum under the free
    quadratic generator and under free + assembled interaction kernels, over
    |t| <= t1 = g^(-1/4) with tau = t1 tied to the packet spreading.  Reports
    sup_t of the state distance and the moment-growth envelope
    g t1 (1 + tau/m_cl + t1^2/(tau m_cl)), whose fitted multiple bounds the
    measured distances.  Pure-scalar interaction terms are a global phase and
    are left out of the generator.
    """
    p = p or ModelParams(m=1.0, g=1.0)
    grid = grid or Grid(x_max=20.0 / p.m, n=512)
    mol = Mollifier()
    modes = modeset_from_gl(p, M=M, k_max=2.0 * p.m)
    space = FockSpace(modes, n_max)
    b = sech(p.m * grid.nodes) ** 2  # satisfies the positivity surrogate

    rows = []
    for g in sorted(gs, reverse=True):
        pg = ModelParams(m=p.m, g=g)
        t1 = g ** (-0.25)
        tau = t1
        sigma = np.sqrt(tau / (2.0 * pg.m_cl))
        aq, aqd = _q_ladder(n_q)
        Qmat = sigma * (aq + aqd)
        P2 = -np.linalg.matrix_power(aq - aqd, 2) / (4.0 * sigma**2)
        Hq = P2 / (2.0 * pg.m_cl)
        freqs = modes.frequencies
        Hfock = np.diag([float(np.dot(occ, freqs)) for occ in space.basis])
        Iq = np.eye(n_q)
        If = np.eye(space.dim)
        Hfree = np.kron(Hq, If) + np.kron(Iq, Hfock)

        terms, _ = build_interaction_kernels(b, modes, mol, kappa, grid, pg)
        Hint = np.zeros_like(Hfree, dtype=complex)
        for tm in terms:
            if tm.kernel is None:
                if tm.q_power == 0:
                    continue  # global phase
                Hint += tm.scalar * np.kron(np.linalg.matrix_power(Qmat, tm.q_power), If)
            else:
                Wm = wick_matrix(tm.kernel, space).toarray()
                Qp = np.linalg.matrix_power(Qmat, tm.q_power) if tm.q_power else Iq
                Hint += np.kron(Qp, Wm)
        Hint = 0.5 * (Hint + Hint.conj().T)  # hermitize roundoff

        psi0_vec = np.zeros(n_q * space.dim, dtype=complex)
        psi0_vec[0] = 1.0  # ground packet x vacuum
        wf, vf = np.linalg.eigh(Hfree)
        wi, vi = np.linalg.eigh(Hfree + Hint)
        cf = vf.conj().T @ psi0_vec
        ci = vi.conj().T @ psi0_vec
        dist = 0.0
        for t in np.linspace(0.0, t1, nt):
            phif = vf @ (np.exp(-1j * wf * t) * cf)
            phii = vi @ (np.exp(-1j * wi * t) * ci)
            dist = max(dist, float(np.linalg.norm(phii - phif)))
        env = g * t1 * (1.0 + tau / pg.m_cl + t1**2 / (tau * pg.m_cl))
        rows.append(DuhamelRow(g=g, t1=t1, sup_distance=dist, envelope=env))
    return rows
