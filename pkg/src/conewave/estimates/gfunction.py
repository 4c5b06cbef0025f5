"""Dyadic pieces G(R, M) of the local smoothing proof and their bounds.

    G(R, M) = int_R^{2R} int_0^inf |(r rho)^{-(n-2)/2} J_nu(r rho) b(M rho) chi(rho)|^2 d rho dr

with chi a smooth bump supported in [1, 2]. The bound shapes are
R^{2 nu - n + 3} D for R <= 1 and R^{-(n-2)} D for R > 1, where
D = int |b(M rho) chi(rho)|^2 rho^{n-1} d rho. Their constants are
witnesses calibrated on the round sphere and frozen.
"""
import numpy as np
from scipy import special

from ..errors import DomainError
from .ensembles import smooth_bump
from .report import GFunctionSample
from ._witness_constants import WITNESS_LARGE_R, WITNESS_SMALL_R

SWEEP_NU = (0.3, 0.4564, 0.5, 1.5, 2.5)
SWEEP_R = (1 / 8, 1 / 2, 2.0, 8.0, 64.0)
SWEEP_M = (1 / 4, 1 / 2, 1.0, 2.0, 4.0)


def default_profile(rho):
    return 1.0 / (1.0 + rho * rho)


def cutoff(rho):
    """Smooth bump supported in [1, 2]."""
    return smooth_bump((np.asarray(rho, dtype=float) - 1.5) / 0.5)


def _gauss(a, b, m):
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _points(R):
    # about 8 nodes per oscillation of J_nu(r rho) over the box
    return 48 + 8 * int(np.ceil(4 * R / np.pi))


def g_value(nu, R, M, profile=default_profile, n=3):
    """G(R, M) by tensor Gauss-Legendre quadrature on [R, 2R] x [1, 2]."""
    m = _points(R)
    r, wr = _gauss(R, 2 * R, m)
    rho, wp = _gauss(1.0, 2.0, m)
    amp = profile(M * rho) * cutoff(rho)
    x = np.outer(r, rho)
    f = x ** (-(n - 2) / 2) * special.jv(nu, x) * amp[None, :]
    return float(wr @ (np.abs(f) ** 2) @ wp)


def profile_norm(M, profile=default_profile, n=3):
    """D = M^{-n} ||b(rho) chi(rho/M) rho^{(n-1)/2}||^2 after rescaling rho -> M rho."""
    rho, wp = _gauss(1.0, 2.0, 96)
    return float(wp @ (np.abs(profile(M * rho) * cutoff(rho)) ** 2 * rho ** (n - 1)))


def bound_shape(nu, R, M, profile=default_profile, n=3):
    """(branch, shape) of the dyadic bound without its constant."""
    D = profile_norm(M, profile, n)
    if R <= 1:
        return "small", R ** (2 * nu - n + 3) * D
    return "large", R ** (-(n - 2)) * D


def witness(branch):
    return WITNESS_SMALL_R if branch == "small" else WITNESS_LARGE_R


def g_function_check(nu, R, M, profile=default_profile, n=3, ell=0):
    """G(R, M) against its branch bound; the sample records the ratio."""
    if not nu > 0:
        raise DomainError("nu must be positive")
    if not (R > 0 and M > 0):
        raise DomainError("R and M must be positive")
    G = g_value(nu, R, M, profile, n)
    branch, shape = bound_shape(nu, R, M, profile, n)
    return GFunctionSample(float(nu), int(ell), float(R), float(M), G, shape, branch)


def within_witness(sample):
    return sample.ratio <= witness(sample.branch)


def g_function_sweep(nus=SWEEP_NU, Rs=SWEEP_R, Ms=SWEEP_M, profile=default_profile, n=3):
    return [g_function_check(nu, R, M, profile, n) for nu in nus for R in Rs for M in Ms]
