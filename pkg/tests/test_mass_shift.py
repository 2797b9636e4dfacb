import numpy as np
import pytest
from scipy.integrate import quad

from kinkspec.mass_shift import (
    dhn_closed_form,
    extrapolate_mass_shift,
    j3_scaled_limit,
    mass_shift_grid,
    naive_mass_shift,
    regularized_breakdown,
)
from kinkspec.mollifier import Mollifier
from kinkspec.params import Grid, ModelParams
from kinkspec.spectral_core import sech

# frozen closed-form constants (independent evaluation of the assembled sums)
NAIVE = 0.5773502691896258          # m / sqrt(3)
DHN = -0.6662545239565592           # m/(2 sqrt 3) - 3 m/pi
J3_LIMIT = -1.9098593171027440      # -6 m / pi
K_INTEGRAL = 1.2091995761561452     # int dk / ((k^2+m^2) sqrt(k^2+4m^2)) = 2 pi/(3 sqrt 3)


def test_naive_value(p):
    assert naive_mass_shift(p) == pytest.approx(NAIVE * p.m, rel=1e-6)


def test_naive_scaling():
    q = ModelParams(m=2.0, g=1.0)
    assert naive_mass_shift(q) == pytest.approx(2.0 * naive_mass_shift(ModelParams()), rel=1e-9)


def test_naive_assembly_factors(p):
    # 1-D factor oracles behind the naive evaluation
    ix4 = quad(lambda x: sech(x) ** 4, -40, 40, limit=200)[0]
    ix2 = quad(lambda x: sech(x) ** 2, -40, 40, limit=200)[0]
    assert ix4 == pytest.approx(4.0 / 3.0, abs=1e-10)
    assert ix2 == pytest.approx(2.0, abs=1e-10)
    ik = quad(lambda k: 1.0 / ((k * k + 1) * np.sqrt(k * k + 4)), -np.inf, np.inf)[0]
    assert ik == pytest.approx(K_INTEGRAL, abs=1e-10)
    assembled = np.sqrt(3.0) + (9 * ix4 - 9 * ix2) * ik / (2 * np.pi)
    assert assembled == pytest.approx(NAIVE, abs=1e-9)


def test_breakdown_ledger_closes(mass_sweep):
    for row in mass_sweep:
        assert row.ledger_gap / abs(row.direct_sum) < 1e-6
        assert row.total_half == 0.5 * row.parts_sum  # exact bookkeeping


def test_j1_j2_vanish(mass_sweep):
    j1 = [abs(r.j1) for r in mass_sweep]
    j2 = [abs(r.j2) for r in mass_sweep]
    assert all(a > b for a, b in zip(j1, j1[1:])) and j1[-1] < 1e-5
    assert all(a > b for a, b in zip(j2, j2[1:])) and j2[-1] < 1e-5


def test_j3_against_exact_reduction(mass_sweep, mol, p):
    # the integration-by-parts reduction is an independent 1-D oracle
    for row in mass_sweep:
        ref = j3_scaled_limit(mol, row.kappa, p)
        assert row.j3 == pytest.approx(ref, abs=2e-5)


def test_j3_anomaly_both_limits(mass_sweep, p):
    # naive (delta-function) j=3 value is zero: the diagonal coefficient of
    # the cubic-in-k term vanishes identically, which is why the naive sum
    # closes at m/sqrt(3).  The true cutoff limit is -6m/pi instead.
    ex3 = extrapolate_mass_shift([(r.kappa, r.j3) for r in mass_sweep])
    assert abs(ex3.value - J3_LIMIT * p.m) < 2e-2 * p.m
    naive_total = naive_mass_shift(p)
    assert naive_total == pytest.approx(NAIVE * p.m, rel=1e-6)
    # discrete + j0 (incl. counter-term fold-in) recovers the naive answer
    ex0 = extrapolate_mass_shift([(r.kappa, r.discrete_term + r.j0) for r in mass_sweep])
    assert abs(ex0.value - NAIVE * p.m) < 1e-3 * p.m


def test_c0_column_limit(mass_sweep, p):
    # the counter-term's momentum-independent part tends to 2m/sqrt(3)
    ex = extrapolate_mass_shift([(r.kappa, r.c0_term) for r in mass_sweep])
    assert abs(ex.value - 2.0 * p.m / np.sqrt(3.0)) < 1e-3 * p.m


def test_extrapolated_shift(mass_sweep, p):
    ex = extrapolate_mass_shift([(r.kappa, r.total_half) for r in mass_sweep])
    assert abs(ex.value - dhn_closed_form(p)) <= 1e-2 * p.m
    assert abs(ex.value - DHN * p.m) <= 1e-2 * p.m


def test_sanity_bounds(mass_sweep, p):
    ex = extrapolate_mass_shift([(r.kappa, r.total_half) for r in mass_sweep])
    assert -p.m < ex.value < 0.0


def test_extrapolation_recovers_synthetic_model():
    kaps = [250.0, 500.0, 1000.0, 2000.0]
    a0, b0 = -0.661, 0.37
    pts = [(k, a0 + b0 * np.log(k) / k) for k in kaps]
    ex = extrapolate_mass_shift(pts)
    assert ex.value == pytest.approx(a0, abs=1e-8)
    assert ex.slope == pytest.approx(b0, abs=1e-6)
    assert ex.residual < 1e-12


def test_extrapolation_input_validation():
    with pytest.raises(ValueError, match="at least 3"):
        extrapolate_mass_shift([(250.0, 1.0), (500.0, 0.9)])
    with pytest.raises(ValueError, match="geometrically"):
        extrapolate_mass_shift([(250.0, 1.0), (260.0, 0.9), (270.0, 0.8)])


def test_breakdown_rejects_bad_inputs(mol, p):
    with pytest.raises(ValueError, match="kappa"):
        regularized_breakdown(mol, 0.5 * p.m, mass_shift_grid(p), p)
    with pytest.raises(ValueError, match="coarse"):
        regularized_breakdown(mol, 100.0, Grid(x_max=20.0 / p.m, n=64), p)


def test_dimensional_scaling_of_breakdown(mol):
    # total_half scales linearly in m (every column is one power of energy)
    q = ModelParams(m=2.0, g=1.0)
    row1 = regularized_breakdown(mol, 500.0, mass_shift_grid(ModelParams()), ModelParams())
    row2 = regularized_breakdown(mol, 1000.0, mass_shift_grid(q, n=1024), q)
    # kappa scales with m as well, so kappa/m is held fixed
    assert row2.total_half == pytest.approx(2.0 * row1.total_half, rel=1e-6)
    assert row2.j3 == pytest.approx(2.0 * row1.j3, rel=1e-6)
