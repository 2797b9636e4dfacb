import numpy as np
import pytest
from scipy.integrate import quad

from kinkspec.mollifier import Mollifier, free_halfkernel_diag, gamma_kappa
from kinkspec.params import Grid, ModelParams, momentum_grid
from kinkspec.regularization_kernels import (
    KernelMatrix,
    ThetaDeformation,
    build_s_matrix,
    counter_term_density,
    kernel_A3,
    log_det_factor,
    regularization_defect_form,
    regularized_kernel,
    wick_power,
    zero_point_density_direct,
    zero_point_discrepancy,
)
from kinkspec.spectral_core import psi0, psi1, sech


# ---------------------------------------------------------------------- mollifier

def test_bump_profile_properties(mol):
    x = np.linspace(-1.5, 1.5, 30001)
    vals = mol.profile(x)
    assert np.all(vals >= 0)
    assert np.max(np.abs(vals - mol.profile(-x))) == 0.0
    assert np.all(vals[np.abs(x) >= 1.0] == 0.0)
    mass = np.trapezoid(vals, x)
    assert abs(mass - 1.0) < 1e-12


def test_bump_transform_at_origin(mol):
    assert mol.fourier(0.0) == pytest.approx(1.0 / np.sqrt(2 * np.pi), abs=1e-12)
    assert mol.fourier_deriv(0.0) == 0.0


def test_gamma_monotone_and_log_growth(mol, p):
    kappas = np.array([1e2, 3e2, 1e3, 3e3, 1e4])
    gams = np.array([gamma_kappa(mol, p, k) for k in kappas])
    assert np.all(np.diff(gams) > 0)
    slope = np.polyfit(np.log(kappas), gams, 1)[0]
    assert slope == pytest.approx(1.0 / (2.0 * np.pi), rel=0.02)


def test_gamma_vanishes_at_small_cutoff(mol, p):
    assert gamma_kappa(mol, p, 1e-4) < 1e-4


def test_gamma_oracle_quadrature(mol, p):
    # independent adaptive quadrature of the defining integral
    kap = 50.0
    ref = quad(lambda k: mol.fourier(k / kap) ** 2 / np.sqrt(k * k + 4 * p.m**2), 0, 60 * kap, limit=400)[0]
    assert gamma_kappa(mol, p, kap) == pytest.approx(ref, rel=1e-8)


# ------------------------------------------------------------ regularized kernels

@pytest.fixture(scope="module")
def small_grid(p):
    return Grid(x_max=20.0 / p.m, n=384)


@pytest.fixture(scope="module")
def small_kgrid(p):
    return momentum_grid(p, k_max=40.0 * p.m, order=12)


def test_identity_kernel_resolves_delta(mol, small_grid, small_kgrid, p):
    # F = 1 at large cutoff: smeared against test pairs gives <f, g>
    km = regularized_kernel(lambda lam: np.ones_like(np.asarray(lam)), mol, small_grid, p,
                            kappa=500.0 * p.m, kgrid=small_kgrid)
    x = small_grid.nodes
    f = np.exp(-(x**2))
    g = np.exp(-((x - 0.4) ** 2) / 1.3)
    ref = complex(small_grid.dot(f, g))
    assert abs(km.smear(f, g) - ref) / abs(ref) < 1e-4


def test_spectral_branch_on_shape_mode(mol, small_grid, small_kgrid, p):
    # F(lambda) = lambda applied to (smeared) psi1 picks out the 3 m^2 branch
    km = regularized_kernel(lambda lam: np.asarray(lam), mol, small_grid, p,
                            kappa=500.0 * p.m, kgrid=small_kgrid)
    x = small_grid.nodes
    v1 = psi1(x, p)
    f = x * np.exp(-(x**2) / 2.0)  # odd test function with psi1 overlap
    val = km.smear(f, v1)
    w = small_grid.weights
    proj = np.dot(f * w, v1) * 3.0 * p.m**2
    assert val == pytest.approx(proj, rel=1e-4)


def test_free_kernel_diagonal_is_twice_gamma(mol, small_grid, p):
    kap = 30.0 * p.m
    kg = momentum_grid(p, k_max=60.0 * kap, order=16)
    km = regularized_kernel(lambda lam: 1.0 / np.sqrt(np.asarray(lam)), mol, small_grid, p,
                            kappa=kap, kgrid=kg, free=True)
    gam = gamma_kappa(mol, p, kap)
    mid = small_grid.n // 2
    assert km.matrix[mid, mid].real == pytest.approx(2.0 * gam, rel=1e-6)


def test_unregularized_call_refused_for_slow_decay(small_grid, small_kgrid, p):
    with pytest.raises(ValueError, match="refused"):
        regularized_kernel(lambda lam: np.ones_like(np.asarray(lam)), None, small_grid, p,
                           kgrid=small_kgrid)


def test_unregularized_ok_for_decaying_multiplier(small_grid, small_kgrid, p):
    km = regularized_kernel(lambda lam: (np.asarray(lam) + p.m**2) ** -1.5, None, small_grid, p,
                            kgrid=small_kgrid)
    km.assert_hermitian(1e-9)


def test_kernel_matrix_hermiticity_guard(small_grid):
    mat = np.eye(small_grid.n)
    mat[0, 1] = 0.5
    with pytest.raises(ValueError, match="hermiticity"):
        KernelMatrix(grid=small_grid, matrix=mat, label="broken").assert_hermitian()


# --------------------------------------------------------------------------- A3

def test_a3_discrete_coefficients_exact(p):
    grid = Grid(x_max=20.0 / p.m, n=512)
    theta = 0.7
    a3 = kernel_A3(theta, grid, p)
    v0, v1 = psi0(grid.nodes, p), psi1(grid.nodes, p)
    w = grid.weights
    # project out the exact outer products: remaining diagonal blocks shrink
    c0 = float((v0 * w) @ a3.matrix @ (v0 * w))
    m2 = a3.matrix - np.outer(v0, v0) / np.sqrt(theta) - np.outer(v1, v1) / (np.sqrt(3) * p.m)
    c0_rest = float((v0 * w) @ m2 @ (v0 * w))
    assert c0 - c0_rest == pytest.approx(1.0 / np.sqrt(theta), rel=1e-12)
    c1 = float((v1 * w) @ a3.matrix @ (v1 * w))
    c1_rest = float((v1 * w) @ m2 @ (v1 * w))
    assert c1 - c1_rest == pytest.approx(1.0 / (np.sqrt(3) * p.m), rel=1e-12)


def test_a3_symmetric_and_decaying(p):
    grid = Grid(x_max=20.0 / p.m, n=256)
    a3 = kernel_A3(1.0, grid, p)
    assert a3.hermiticity_defect() < 1e-10
    corner = max(abs(a3.matrix[0, 0]), abs(a3.matrix[0, -1]), abs(a3.matrix[-1, -1]))
    assert corner < 1e-6 * np.max(np.abs(a3.matrix))


def test_a3_rejects_bad_theta(p):
    with pytest.raises(ValueError):
        kernel_A3(0.0, Grid(x_max=20.0, n=128), p)


def test_theta_deformation_width_relation(p):
    th = ThetaDeformation(0.8)
    sig = th.sigma(p)
    assert np.sqrt(th.theta) == pytest.approx(1.0 / (2.0 * sig**2 * p.m_cl), rel=1e-14)
    back = ThetaDeformation.from_sigma(sig, p)
    assert back.theta == pytest.approx(th.theta, rel=1e-12)
    with pytest.raises(ValueError):
        ThetaDeformation(-1.0)


# ----------------------------------------------------------------- S and log-det

def test_s_matrix_minus_one_eigenpair(smatrix0, p):
    lam = smatrix0.eigenvalues
    i = int(np.argmin(np.abs(lam + 1.0)))
    assert abs(lam[i] + 1.0) < 1e-3
    from kinkspec.regularization_kernels import apply_fourier_multiplier
    e1 = np.real(apply_fourier_multiplier(psi0(smatrix0.grid.nodes, p), smatrix0.grid,
                                          lambda k: (k * k + 4 * p.m**2) ** 0.25))
    e1 /= np.linalg.norm(e1)
    assert abs(np.dot(smatrix0.eigenvectors[:, i], e1)) >= 0.999


def test_rank_one_shift_machine_precision(smatrix0):
    s1 = smatrix0.shift(1.0)
    s4 = smatrix0.shift(4.0)
    r = smatrix0.rank_one_vector
    diff = s4.matrix - s1.matrix - (2.0 - 1.0) * smatrix0.grid.h * np.outer(r, r)
    assert np.max(np.abs(diff)) < 1e-14


def test_trace_norm_tail_cauchy(smatrix0, p):
    tail_512 = smatrix0.tail_fraction(200)
    s_1024 = build_s_matrix(0.0, Grid(x_max=20.0 / p.m, n=1024), p, theta_ref=p.m**2)
    assert tail_512 < 1e-3
    assert s_1024.tail_fraction(200) < 1e-3
    # total trace norm converges under refinement
    assert abs(s_1024.trace_norm - smatrix0.trace_norm) / smatrix0.trace_norm < 1e-2


def test_log_det_ratio_oracle(smatrix0):
    # det ratio via the rank-one determinant lemma:
    # det(1+S(t')) / det(1+S(t)) = 1 + (sqrt(t') - sqrt(t)) <r, (1+S(t))^-1 r>_h
    s1 = smatrix0.shift(1.0)
    s4 = smatrix0.shift(4.0)
    ld1, ld4 = log_det_factor(s1), log_det_factor(s4)
    h = smatrix0.grid.h
    r = smatrix0.rank_one_vector
    sol = np.linalg.solve(np.eye(s1.matrix.shape[0]) + s1.matrix, r)
    lemma = 1.0 + (2.0 - 1.0) * h * float(np.dot(r, sol))
    assert 2.0 * (ld4 - ld1) == pytest.approx(np.log(lemma), rel=1e-8)


def test_log_det_monotone_in_theta(smatrix0):
    thetas = [0.25, 0.5, 1.0, 2.0, 4.0]
    vals = [log_det_factor(smatrix0.shift(t)) for t in thetas]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_log_det_grid_stability(p):
    v = {}
    for n in (512, 1024):
        s = build_s_matrix(1.0, Grid(x_max=20.0 / p.m, n=n), p, theta_ref=1.0)
        v[n] = log_det_factor(s)
    assert abs(v[1024] - v[512]) / abs(v[512]) < 1e-2


def test_log_det_rejects_singular(smatrix0):
    with pytest.raises(ValueError, match="log-det undefined"):
        log_det_factor(smatrix0)  # theta = 0 has the exact -1 eigenvalue


def test_build_s_rejects_negative_theta(p):
    with pytest.raises(ValueError):
        build_s_matrix(-1.0, Grid(x_max=20.0, n=128), p)


# ------------------------------------------------------------------- zero point

def test_zero_point_decay_and_routes(mol, p):
    grid = Grid(x_max=20.0 / p.m, n=512)
    kappas = [100.0, 200.0, 400.0, 800.0]
    res = [zero_point_discrepancy(mol, k, grid, p) for k in kappas]
    vals = np.array([r.value for r in res])
    assert np.all(np.diff(vals) < 0)
    # fitted log(k)/k envelope bounds the sequence
    model = np.log(kappas) / np.asarray(kappas)
    c = float(np.dot(model, vals) / np.dot(model, model))
    assert np.all(vals <= 1.05 * c * model) and np.all(vals >= 0.6 * c * model)
    # pointwise density: signed integral cancels, two quadrature routes agree
    for r, k in zip(res, kappas):
        assert abs(r.signed) < 1e-12 * r.density_l1 + 1e-13
        direct = zero_point_density_direct(mol, k, r.grid, p)
        # routes share only the exact integrand; gamma_kappa enters route 2
        # through its own adaptive quadrature (absolute floor ~1e-11)
        assert np.max(np.abs(direct - r.density)) < 1e-6 * np.max(np.abs(r.density)) + 5e-11


def test_zero_point_rejects_small_cutoff(mol, p):
    with pytest.raises(ValueError):
        zero_point_discrepancy(mol, 0.5 * p.m, Grid(x_max=20.0, n=128), p)


# ----------------------------------------------------- counter-term identity

def test_counter_term_identity_machine_precision(mol, p):
    kap = 40.0 * p.m
    gam = gamma_kappa(mol, p, kap)
    khalf = free_halfkernel_diag(mol, p, kap)
    rng = np.random.default_rng(3)
    phi = rng.normal(scale=2.0, size=257)
    raw = 2 * p.m * p.g * phi**3 + 0.5 * p.g**2 * phi**4
    wick = 2 * p.m * p.g * wick_power(phi, 3, gam) + 0.5 * p.g**2 * wick_power(phi, 4, gam)
    lhs = counter_term_density(phi, gam, khalf, p)
    rhs = (wick - raw) - 0.5 * khalf
    scale = max(np.max(np.abs(raw)), abs(khalf))
    assert np.max(np.abs(lhs - rhs)) < 1e-14 * scale  # pure algebra, roundoff only


def test_wick_powers_reference_values():
    assert wick_power(2.0, 2, 0.5) == 3.5
    assert wick_power(2.0, 3, 0.5) == 5.0
    assert wick_power(2.0, 4, 0.5) == 4.75
    with pytest.raises(ValueError):
        wick_power(1.0, 5, 0.1)


# -------------------------------------------- two-regularization consistency

def test_regularization_defect_vanishes(mol, p):
    kg = momentum_grid(p, k_max=30.0 * p.m, order=8)
    f = np.exp(-((kg.nodes - 1.0) ** 2)).astype(complex)
    g = np.exp(-((kg.nodes + 0.5) ** 2) / 2.0).astype(complex)
    kappas = np.array([50.0, 100.0, 200.0, 400.0])
    vals = np.array([abs(regularization_defect_form(f, g, mol, k, kg, p)) for k in kappas])
    assert np.all(np.diff(vals) < 0)
    envelope = np.log(kappas) / kappas
    c = float(np.dot(envelope, vals) / np.dot(envelope, envelope))
    assert np.all(vals <= (abs(c) + 1e-12) * envelope * 1.5)
    pair = abs(regularization_defect_form(f, g, mol, 100.0, kg, p, channel="pair"))
    assert pair < abs(regularization_defect_form(f, g, mol, 50.0, kg, p, channel="pair")) + 1e-12
    with pytest.raises(ValueError):
        regularization_defect_form(f, g, mol, 100.0, kg, p, channel="bogus")
