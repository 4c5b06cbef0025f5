"""Uniform Sobolev probe ||(L_V - sigma)^{-1} f||_{L^6} / ||f||_{L^{6/5}} in n = 3."""
from dataclasses import dataclass

import numpy as np

from ..calculus import apply_spectral_multiplier
from ..errors import DomainError
from .resolvent import check_sigma

P_IN = 6 / 5
P_OUT = 6.0


@dataclass(frozen=True)
class SobolevProbe:
    sigmas: tuple
    quotients: np.ndarray  # (len(sigmas), fields)

    @property
    def sup(self):
        return float(np.max(self.quotients)) if self.quotients.size else 0.0


def resolvent_apply(field, sigma):
    check_sigma(sigma)
    return apply_spectral_multiplier(field, lambda rho: 1 / (rho * rho - complex(sigma)))


def sobolev_quotient(field, sigma, degree=None):
    """One quotient on the uniform radial grid times the Y quadrature."""
    grid = field.grid
    if grid.n != 3:
        raise DomainError("the uniform Sobolev pair (6/5, 6) is for n = 3")
    ph = grid.physical(degree if degree is not None else 6 * grid.model.L_max)
    f = ph.values(field)
    den = ph.lp_norm(f, P_IN)
    if den == 0:
        return 0.0
    u = ph.values(resolvent_apply(field, sigma))
    return ph.lp_norm(u, P_OUT) / den


def uniform_sobolev_probe(fields, sigmas, degree=None):
    sigmas = tuple(complex(s) for s in np.atleast_1d(sigmas))
    for s in sigmas:
        check_sigma(s)
    Q = np.array([[sobolev_quotient(f, s, degree) for f in fields] for s in sigmas])
    return SobolevProbe(sigmas, Q.reshape(len(sigmas), len(fields)))


def yukawa_radial(f, r, k=1.0, upper=None, points=4000):
    """(-Delta + k^2)^{-1} of a radial function in R^3 by the 1D Green's formula.

    u(r) = (1 / (2 k r)) int_0^inf f(s) s (e^{-k|r-s|} - e^{-k(r+s)}) ds.
    """
    from scipy import integrate
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty(len(r))
    for i, ri in enumerate(r):
        g = lambda s: f(s) * s * (np.exp(-k * abs(ri - s)) - np.exp(-k * (ri + s)))
        top = upper if upper is not None else np.inf
        val = integrate.quad(g, 0, ri, limit=200)[0] + integrate.quad(g, ri, top, limit=200)[0]
        out[i] = val / (2 * k * ri)
    return out
