"""Spectral, regularization and dynamics toolkit for semiclassical kink
quantization at desk scale.

Subpackage map:

* :mod:`kinkspec.params` — model constants, position/momentum grids
* :mod:`kinkspec.spectral_core` — closed-form spectral data of the kink
  fluctuation operator (bound states, scattering phases, ladder algebra)
* :mod:`kinkspec.distorted_transform` — distorted Fourier analysis, wave and
  scattering operators
* :mod:`kinkspec.mollifier` / :mod:`kinkspec.regularization_kernels` —
  smooth cutoff, Wick constants, regularized kernels, trace-class covariance
  comparison, determinant surrogates
* :mod:`kinkspec.mass_shift` — the semiclassical mass-shift engine
* :mod:`kinkspec.wavepackets` — spreading Gauss-Hermite packets
* :mod:`kinkspec.fock_sim` — truncated Fock space, Wick operators,
  interaction kernels, linearized dynamics
* :mod:`kinkspec.cli` — batch interface (``kinkspec <subcommand>``)
"""

from .params import Grid, ModelParams, MomentumGrid, default_grid, momentum_grid
from .spectral_core import (
    DiscreteEigenpair,
    ScatteringState,
    discrete_eigenpairs,
    generalized_eigenfunction,
    psi0,
    psi1,
    scattering_phase,
    soliton_profile,
)
from .distorted_transform import DistortedTransform, SpectralCoefficients
from .mollifier import Mollifier, gamma_kappa
from .mass_shift import (
    MassShiftBreakdown,
    dhn_closed_form,
    extrapolate_mass_shift,
    naive_mass_shift,
    regularized_breakdown,
    sweep_mass_shift,
)
from .regularization_kernels import (
    KernelMatrix,
    SMatrixResult,
    ThetaDeformation,
    build_S_matrix,
    build_s_matrix,
    kernel_A3,
    log_det_factor,
    regularized_kernel,
    zero_point_discrepancy,
)
from .wavepackets import WavePacket, chi_eval, packet_superposition_evolve, schrodinger_residual
from .fock_sim import (
    FockSpace,
    ModeSet,
    TruncatedFockState,
    WickKernel,
    build_interaction_kernels,
    linearized_classical_evolution,
    modeset_from_gl,
    quadratic_evolution,
    zero_mode_growth_ratio,
)

__version__ = "0.1.0"
