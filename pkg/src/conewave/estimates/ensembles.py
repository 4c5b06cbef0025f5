"""Seeded random fields with smooth, compactly supported spectral profiles.

Each mode carries b_j(rho) = rho^{-2} sum_i xi_ji psi((rho - rho_i)/w) with
complex Gaussian xi and a C^infty bump psi. Because b_j is a fixed function
of rho, the same seed gives the same continuum field on every grid, which is
what refinement and horizon-doubling comparisons need.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..fields import SPECTRAL, ConeField

DEFAULT_SIZE = 50
DEFAULT_BAND = (1.0, 3.0)
DEFAULT_SPACING = 0.25


def smooth_bump(x):
    """exp(1 - 1/(1 - x^2)) on |x| < 1, zero outside; equals 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 1
    out[m] = np.exp(1 - 1 / (1 - x[m] ** 2))
    return out


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Random fields on one grid; `coeffs` holds b_j(rho_k), shape (size, modes, N)."""
    grid: object
    coeffs: np.ndarray
    seed: int
    band: tuple

    @property
    def size(self):
        return self.coeffs.shape[0]

    def scaled(self):
        """Orthonormal spectral coordinates, shape (size, modes, N)."""
        return self.coeffs * self.grid.frequency_scale[None]

    def member(self, i):
        return ConeField(self.grid, SPECTRAL, self.coeffs[i])

    def __iter__(self):
        return (self.member(i) for i in range(self.size))

    def __len__(self):
        return self.size

    def regrid(self, grid):
        """Same continuum fields sampled on another grid with the same modes."""
        return random_ensemble(grid, self.size, self.seed, self.band)


def spectral_profiles(rho, xi, band, spacing=DEFAULT_SPACING):
    """b(rho) for weights xi of shape (..., centers)."""
    centers = _centers(band, spacing)
    if xi.shape[-1] != len(centers):
        raise DomainError("weights do not match the number of bump centers")
    psi = smooth_bump((rho[..., None] - centers) / (2 * spacing))
    return np.einsum("...kc,...c->...k", psi, xi) / rho ** 2


def _centers(band, spacing=DEFAULT_SPACING):
    # bumps have half-width 2 * spacing, so their union is exactly [lo, hi]
    lo, hi = band
    centers = np.arange(lo + 2 * spacing, hi - 2 * spacing + spacing / 2, spacing)
    if len(centers) == 0:
        raise DomainError(f"band must be wider than {4 * spacing}")
    return centers


def random_ensemble(grid, size=DEFAULT_SIZE, seed=0, band=DEFAULT_BAND):
    """`size` random fields with spectral support inside `band`."""
    lo, hi = map(float, band)
    if not 0 < lo < hi:
        raise DomainError("band must satisfy 0 < lo < hi")
    if hi > 0.9 * grid.rho_max:
        raise DomainError(f"band edge {hi} is not resolved (rho_max = {grid.rho_max:.3g})")
    K = grid.num_modes
    nc = len(_centers((lo, hi)))
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal((size, K, nc, 2)) @ np.array([1.0, 1j]) / np.sqrt(2)
    rho = grid.frequency_nodes  # (K, N)
    coeffs = np.stack([spectral_profiles(rho, xi[s], (lo, hi)) for s in range(size)])
    return Ensemble(grid, coeffs, int(seed), (lo, hi))
