"""Weighted resolvent norms ||r^{-1} (L_V - sigma)^{-1} r^{-1}|| per mode.

On a mode of order nu the resolvent is U diag(1/(rho^2 - sigma)) U in
scaled coordinates and r^{-1} is diagonal on the mode's nodes. The largest
singular value is found by Lanczos bidiagonalization.

For sigma = -k^2 the same operator has the kernel I_nu(k r_<) K_nu(k r_>)
against r' dr' (in phi = r^{(n-2)/2} a). Sampling it on the nodes with the
plan's weights gives an independent Nystrom matrix; the derivative jump
-1/r of the kernel on the diagonal is removed with the trapezoid
Euler-Maclaurin term h^2/12.
"""
import numpy as np
from scipy import special
from scipy.sparse.linalg import LinearOperator, svds

from ..errors import DomainError, SigmaOnSpectrum
from ..fields import ConeGrid
from .report import QuotientReport, stable

SPECTRUM_TOL = 1e-6
DEFAULT_MODULI = tuple(np.logspace(-2, 2, 5))
DEFAULT_ANGLES = tuple(np.pi * np.array([0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75]))


def distance_to_spectrum(sigma):
    sigma = complex(sigma)
    return abs(sigma.imag) if sigma.real >= 0 else abs(sigma)


def check_sigma(sigma):
    if distance_to_spectrum(sigma) < SPECTRUM_TOL:
        raise SigmaOnSpectrum(f"sigma = {sigma} lies within {SPECTRUM_TOL:g} of [0, inf)")


def sigma_grid(moduli=DEFAULT_MODULI, angles=DEFAULT_ANGLES):
    return [m * np.exp(1j * a) for m in moduli for a in angles]


def weighted_resolvent_norm(plan, sigma):
    """Largest singular value of diag(1/r) U diag(1/(rho^2 - sigma)) U diag(1/r)."""
    check_sigma(sigma)
    U = plan.matrix
    d = 1 / plan.radial_nodes
    m = 1 / (plan.frequency_nodes ** 2 - complex(sigma))
    N = plan.N
    if N <= 64:
        A = (d[:, None] * U * m[None, :]) @ U * d[None, :]
        return float(np.linalg.norm(A, 2))
    op = LinearOperator((N, N), dtype=complex,
                        matvec=lambda x: d * (U @ (m * (U @ (d * x.ravel())))),
                        rmatvec=lambda x: d * (U @ (m.conj() * (U @ (d * x.ravel())))))
    s = svds(op, k=1, tol=1e-10, v0=np.ones(N, complex), return_singular_vectors=False)
    return float(s[0])


def kernel_resolvent_norm(plan, k):
    """Norm of the I/K-kernel Nystrom matrix for (L_nu + k^2)^{-1}, weighted by 1/r."""
    if not k > 0:
        raise DomainError("k must be positive")
    r = plan.radial_nodes
    W = plan.radial_weights
    nu = plan.order
    lo = k * np.minimum.outer(r, r)
    hi = k * np.maximum.outer(r, r)
    G = special.ive(nu, lo) * special.kve(nu, hi) * np.exp(lo - hi)
    sw = np.sqrt(W) / r
    A = sw[:, None] * G * sw[None, :]
    h = np.pi * plan.R_max / plan.zeros[plan.N]
    # the jump of d/dr' G(r, r') at r' = r is -1/r for every k
    A[np.diag_indices(plan.N)] -= h * h / 12 / r ** 2
    return float(np.linalg.norm(A, 2))


def _scan(grid, sigmas):
    best = (0.0, None, None)
    for p, plan in enumerate(grid.plans):
        for sigma in sigmas:
            v = weighted_resolvent_norm(plan, sigma)
            if v > best[0]:
                best = (v, plan.order, sigma)
    return best


def resolvent_sup_scan(grid, sigmas=None):
    """sup over sigma and modes of the weighted resolvent norm, and at doubled N."""
    sigmas = sigma_grid() if sigmas is None else list(sigmas)
    for s in sigmas:
        check_sigma(s)
    sup, nu, sig = _scan(grid, sigmas)
    fine = ConeGrid(grid.geometry, grid.R_max, 2 * grid.N)
    sup2, nu2, sig2 = _scan(fine, sigmas)
    return QuotientReport(
        "resolvent", {"N": grid.N, "R_max": grid.R_max, "sigmas": len(sigmas), "n": grid.n},
        len(sigmas), sup, sup2, stable(sup, sup2), (),
        {"nu_at_sup": nu, "sigma_at_sup": sig, "nu_at_sup_doubled": nu2,
         "sigma_at_sup_doubled": sig2})
