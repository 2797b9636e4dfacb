"""The smooth cutoff and the Wick constants it generates.

Convolution with the scaled bump delta_kappa implements a soft momentum
cutoff at scale kappa.  The coincident-point covariance gamma_kappa grows
like log(kappa)/(2 pi) and fixes the normal-ordering subtractions; the
counter-term density is a pure Wick-algebra identity.
"""

import numpy as np

from kinkspec import ModelParams, Mollifier, gamma_kappa
from kinkspec.mollifier import free_halfkernel_diag
from kinkspec.regularization_kernels import counter_term_density, wick_power

p = ModelParams()
mol = Mollifier()

print("bump profile: smooth, even, unit mass on [-1, 1]")
x = np.linspace(-1.25, 1.25, 100001)
print(f"  mass = {np.trapezoid(mol.profile(x), x):.12f}")
print(f"  transform at 0: {mol.fourier(0.0):.12f}  (= 1/sqrt(2 pi) = {1/np.sqrt(2*np.pi):.12f})")

print("\ngamma_kappa vs log(kappa)/(2 pi):")
for kap in (1e2, 1e3, 1e4):
    print(f"  kappa = {kap:8.0f}: gamma = {gamma_kappa(mol, p, kap):.6f}"
          f"   ln(kappa)/2pi = {np.log(kap)/(2*np.pi):.6f}")

# counter-term ledger on c-number samples: raw vs Wick-ordered polynomials
kap = 50.0
gam = gamma_kappa(mol, p, kap)
khalf = free_halfkernel_diag(mol, p, kap)
phi = np.linspace(-3.0, 3.0, 7)
raw = 2 * p.m * p.g * phi**3 + 0.5 * p.g**2 * phi**4
wick = 2 * p.m * p.g * wick_power(phi, 3, gam) + 0.5 * p.g**2 * wick_power(phi, 4, gam)
ct = counter_term_density(phi, gam, khalf, p)
print("\ncounter-term identity (should be zero row):")
print("  ", np.abs(ct - ((wick - raw) - 0.5 * khalf)))
