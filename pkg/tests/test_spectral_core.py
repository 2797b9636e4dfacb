import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinkspec.params import Grid, GridResolutionError, ModelParams
from kinkspec.spectral_core import (
    apply_K,
    discrete_eigenpairs,
    eigen_residual,
    eigenfunction_matrix,
    eigenfunction_values,
    generalized_eigenfunction,
    ladder_apply,
    psi0,
    psi0_second_derivative,
    psi1,
    psi1_second_derivative,
    scattering_phase,
    sech,
    soliton_profile,
)

TANH1 = 0.7615941559557649  # tanh(1), frozen from the closed form


def test_soliton_profile_odd_and_vacua(p):
    assert soliton_profile(0.0, p) == 0.0
    assert soliton_profile(50.0, p) == pytest.approx(p.m / p.g, abs=1e-15)
    assert soliton_profile(-50.0, p) == pytest.approx(-p.m / p.g, abs=1e-15)
    assert soliton_profile(1.0, p) == pytest.approx(TANH1, abs=1e-12)


def test_soliton_profile_scaling():
    q = ModelParams(m=2.5, g=0.7)
    assert soliton_profile(0.3, q) == pytest.approx((2.5 / 0.7) * np.tanh(2.5 * 0.3), rel=1e-14)


def test_bound_states_orthonormal(grid, p):
    zero, shape = discrete_eigenpairs(grid, p)
    w = grid.weights
    assert np.dot(zero.values**2, w) == pytest.approx(1.0, abs=1e-8)
    assert np.dot(shape.values**2, w) == pytest.approx(1.0, abs=1e-8)
    assert abs(np.dot(zero.values * w, shape.values)) < 1e-12
    assert zero.eigenvalue == 0.0
    assert shape.eigenvalue == pytest.approx(3.0 * p.m**2)


def test_bound_state_eigenrelations(grid, p):
    zero, shape = discrete_eigenpairs(grid, p)
    k0 = apply_K(zero.values, grid, p, second_derivative=psi0_second_derivative(grid.nodes, p))
    k1 = apply_K(shape.values, grid, p, second_derivative=psi1_second_derivative(grid.nodes, p))
    assert np.max(np.abs(k0)) < 1e-8
    assert np.max(np.abs(k1 - 3.0 * p.m**2 * shape.values)) < 1e-8


def test_scattering_phase_origin_and_limit(p):
    assert scattering_phase(0.0, p) == 0.0
    # continuous branch runs to -pi for k -> +infinity; magnitude approaches pi
    assert abs(scattering_phase(1e3 * p.m, p)) == pytest.approx(np.pi, abs=5e-3)
    assert abs(abs(scattering_phase(1e6 * p.m, p)) - np.pi) < 1e-5


@given(k=st.floats(min_value=-80.0, max_value=80.0, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_phase_factor_unimodular_and_odd(k):
    p = ModelParams()
    d = scattering_phase(k, p)
    num = -(k**2) - 3j * p.m * k + 2 * p.m**2
    den = np.sqrt((k * k + p.m**2) * (k * k + 4 * p.m**2))
    assert abs(abs(num / den) - 1.0) < 1e-12
    assert np.exp(1j * d) == pytest.approx(num / den, abs=1e-12)
    assert scattering_phase(-k, p) == pytest.approx(-d, abs=1e-13)


def test_phase_continuity(p):
    ks = np.linspace(-60, 60, 40001) * p.m
    d = scattering_phase(ks, p)
    assert np.max(np.abs(np.diff(d))) < 0.02  # no branch jumps


def test_eigenrelation_residual(grid, p):
    for k in (0.3, 1.0, 4.0, 17.0):
        st_ = generalized_eigenfunction(k, grid, p)
        assert eigen_residual(st_, p) < 1e-8


def test_incoming_wave_normalization(p):
    # k > 0: E_k approaches exp(ikx) to exponential accuracy as x -> -oo
    v = eigenfunction_values(2.0, np.array([-15.0]), p)
    assert abs(v[0] - np.exp(2j * -15.0)) < 1e-5


def test_transmitted_wave_phase(p):
    k = 1.3
    d = float(scattering_phase(k, p))
    v = eigenfunction_values(k, np.array([18.0]), p)
    assert abs(v[0] - np.exp(2j * d) * np.exp(1j * k * 18.0)) < 1e-5


def test_continuum_orthogonal_to_bound_states(grid, p):
    zero, shape = discrete_eigenpairs(grid, p)
    w = grid.weights
    for k in (0.5, 1.0, 3.0):
        E = eigenfunction_values(k, grid.nodes, p)
        bound = 1e-6 * np.max(np.abs(E))
        assert abs(np.dot(zero.values * w, E)) < bound
        assert abs(np.dot(shape.values * w, E)) < bound


def test_zero_momentum_eigenfunction(grid, p):
    # exact closed form at k = 0: 1 - (3/2) sech^2(mx)
    E0 = eigenfunction_values(0.0, grid.nodes, p)
    ref = 1.0 - 1.5 * sech(p.m * grid.nodes) ** 2
    assert np.max(np.abs(E0 - ref)) < 1e-12


def test_eigenfunction_matrix_consistency(grid, p):
    ks = np.array([-2.0, 0.7, 5.0])
    mat = eigenfunction_matrix(ks, grid.nodes, p)
    for i, k in enumerate(ks):
        assert np.max(np.abs(mat[i] - eigenfunction_values(k, grid.nodes, p))) < 1e-14


def test_ladder_kills_sech(grid, p):
    f = sech(p.m * grid.nodes)
    deriv = -p.m * f * np.tanh(p.m * grid.nodes)
    out = ladder_apply("A", f, grid, p, derivative=deriv)
    assert np.max(np.abs(out)) < 1e-12


def test_ladder_factorization_reproduces_K(grid, p):
    # B+ B f = K f for the shape mode (finite differences, interior points)
    f = psi1(grid.nodes, p)
    bf = ladder_apply("B", f, grid, p)
    bbf = ladder_apply("B+", bf, grid, p)
    interior = slice(8, -8)
    assert np.max(np.abs(bbf - 3.0 * p.m**2 * f)[interior]) < 1e-5


def test_ladder_builds_continuum_state(grid, p):
    # B+ A+ e^{ikx} is proportional to E_k
    k = 1.7
    e_free = np.exp(1j * k * grid.nodes)
    a_dag = ladder_apply("A+", e_free, grid, p, derivative=1j * k * e_free)
    d_a = 1j * k * a_dag + p.m**2 * sech(p.m * grid.nodes) ** 2 * e_free  # analytic derivative of A+ e
    b_a = ladder_apply("B+", a_dag, grid, p, derivative=d_a)
    E = eigenfunction_values(k, grid.nodes, p)
    norm = np.sqrt((k**2 + p.m**2) * (k**2 + 4 * p.m**2))
    phase = np.exp(1j * float(scattering_phase(k, p)))
    assert np.max(np.abs(b_a * phase / norm - E)) < 1e-10


def test_apply_K_on_constant(grid, p):
    f = np.ones(grid.n)
    out = apply_K(f, grid, p)
    expect = 4.0 * p.m**2 - 6.0 * p.m**2 * sech(p.m * grid.nodes) ** 2
    interior = slice(4, -4)
    assert np.max(np.abs(out - expect)[interior]) < 1e-8


def test_apply_K_rejects_coarse_grid(p):
    coarse = Grid(x_max=20.0 / p.m, n=32)
    f = np.cos(3.0 * coarse.nodes)
    with pytest.raises(GridResolutionError):
        apply_K(f, coarse, p, tol=1e-8)


def test_nonfinite_momentum_rejected(grid, p):
    with pytest.raises(ValueError):
        generalized_eigenfunction(np.nan, grid, p)
    with pytest.raises(ValueError):
        scattering_phase(np.inf, p)


@given(m=st.floats(min_value=0.3, max_value=4.0), g=st.floats(min_value=0.2, max_value=3.0))
@settings(max_examples=20, deadline=None)
def test_derived_scales(m, g):
    q = ModelParams(m=m, g=g)
    assert q.m_cl == pytest.approx(4 * m**3 / 3, rel=1e-15)
    assert q.omega_d**2 == pytest.approx(3 * m**2, rel=1e-14)
    assert q.phi0 == pytest.approx(m / g, rel=1e-15)
    assert q.M_cl == pytest.approx(q.m_cl / g**2, rel=1e-15)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        ModelParams(m=-1.0)
    with pytest.raises(ValueError):
        ModelParams(g=0.0)
