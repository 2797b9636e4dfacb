import numpy as np
import pytest

from kinkspec.config import RunConfig
from kinkspec.distorted_transform import DistortedTransform
from kinkspec.mass_shift import mass_shift_grid, sweep_mass_shift
from kinkspec.mollifier import Mollifier
from kinkspec.params import Grid, ModelParams, default_grid, momentum_grid
from kinkspec.regularization_kernels import build_s_matrix


@pytest.fixture(scope="session")
def p():
    return ModelParams(m=1.0, g=1.0)


@pytest.fixture(scope="session")
def grid(p):
    return default_grid(p)


@pytest.fixture(scope="session")
def kgrid(p):
    return momentum_grid(p)


@pytest.fixture(scope="session")
def transform(grid, kgrid, p):
    return DistortedTransform(grid, kgrid, p)


@pytest.fixture(scope="session")
def mol():
    return Mollifier()


@pytest.fixture(scope="session")
def mass_sweep(mol, p):
    return sweep_mass_shift(mol, (250.0, 500.0, 1000.0, 2000.0), mass_shift_grid(p), p)


@pytest.fixture(scope="session")
def smatrix0(p):
    """S(0) on the default kernel grid (n = 512)."""
    return build_s_matrix(0.0, Grid(x_max=20.0 / p.m, n=512), p, theta_ref=p.m**2)


@pytest.fixture(scope="session")
def acceptance_cache(transform, mass_sweep, smatrix0):
    """Shared heavy artifacts for the acceptance module."""
    return {
        "transform": transform,
        "sweep": mass_sweep,
        "smatrix-512": smatrix0,
        "mol": Mollifier(),
    }


@pytest.fixture(scope="session")
def run_config():
    return RunConfig()
