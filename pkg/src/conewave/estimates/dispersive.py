"""Dispersive decay of ground-mode Gaussian data and its log-log slope.

The data is u_0 = a(r) phi_0(y) with a(r) = r^{nu - (n-2)/2} e^{-r^2 / (2 w^2)}
in the lowest mode of order nu = nu0. Its Hankel transform is known in
closed form,

    b(rho) = w^{2 nu + 2} rho^{nu - (n-2)/2} e^{-w^2 rho^2 / 2},

so the data is exact on any frequency grid and the evolution is
b e^{i t rho^2}. For nu = (n-2)/2 this is a centred Gaussian. Profiles are
synthesized from the Fourier-Bessel series on the observation radii; the
transform matrix of the plan is never formed.
"""
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import DomainError, FitUnstable
from ..hankel import plan_dht

FIT_RESIDUAL_MAX = 0.1
DEFAULT_TIMES = tuple(np.geomspace(1.0, 100.0, 13))


@dataclass(frozen=True)
class DispersiveFit:
    slope: float
    intercept: float
    residual: float
    times: tuple
    sup: tuple
    sup_refined: tuple
    nu0: float

    @property
    def refinement_change(self):
        a, b = np.array(self.sup), np.array(self.sup_refined)
        return float(np.max(np.abs(b / a - 1)))


def ground_profile(nu, n, w, r):
    return r ** (nu - (n - 2) / 2) * np.exp(-r * r / (2 * w * w))


def ground_transform(nu, n, w, rho):
    return w ** (2 * nu + 2) * rho ** (nu - (n - 2) / 2) * np.exp(-(w * rho) ** 2 / 2)


def _angular_factors(model):
    """(sup |phi_0|, int |phi_0|) over the cross-section.

    Models without eigenfunctions use (1, 1): the scan then measures the
    radial profile alone with radial L^1 normalization.
    """
    if not model.supports_evaluation:
        return 1.0, 1.0
    pts, wq = model.quadrature(max(4 * model.L_max, 8))
    phi = np.abs(model.evaluate(pts)[:, 0])
    return float(phi.max()), float(wq @ phi)


def radial_l1(nu, n, w):
    """int a(r) r^{n-1} dr = w^{nu + n/2 + 1} 2^{(nu + n/2 - 1)/2} Gamma((nu + n/2 + 1)/2)."""
    p = nu + n / 2
    return w ** (p + 1) * 2 ** ((p - 1) / 2) * special.gamma((p + 1) / 2)


def observation_radii(plan, count):
    """The first `count` radial nodes and the grid with midpoints inserted.

    When nu0 < (n-2)/2 the profile is unbounded at the apex and the sup
    sits at the first node, so both grids start there.
    """
    r = plan.radial_nodes[:count]
    mid = 0.5 * (r[1:] + r[:-1])
    return r, np.sort(np.concatenate([r, mid]))


def dispersive_decay_scan(geometry, times=DEFAULT_TIMES, width=0.5, R_max=1500.0, N=5700,
                          points=400):
    """Least-squares slope of log sup|u(t)| against log t for L^1-normalized data."""
    times = np.asarray(times, dtype=float)
    if times.min() < 1 or times.max() > 100 or len(times) < 3:
        raise DomainError("times must lie in [1, 100] with at least three samples")
    model = geometry.cross_section
    n = geometry.n
    nu = model.nu0
    plan = plan_dht(nu, n, R_max, N)
    if width * plan.rho_max < 5.5:
        raise DomainError("frequency grid does not resolve the data width")
    sup_phi, l1_phi = _angular_factors(model)
    mass = radial_l1(nu, n, width) * l1_phi
    c = plan.frequency_scale * ground_transform(nu, n, width, plan.frequency_nodes)
    coarse, fine = observation_radii(plan, points)
    E = np.exp(1j * np.outer(plan.frequency_nodes ** 2, times))
    sups = []
    for r in (coarse, fine):
        prof = plan.synthesis_matrix(r) @ (c[:, None] * E)
        sups.append(np.abs(prof).max(axis=0) * sup_phi / mass)
    x, y = np.log(times), np.log(sups[1])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.max(np.abs(A @ np.array([slope, intercept]) - y)))
    fit = DispersiveFit(float(slope), float(intercept), residual, tuple(times),
                        tuple(map(float, sups[0])), tuple(map(float, sups[1])), nu)
    if residual > FIT_RESIDUAL_MAX:
        raise FitUnstable(f"log-log fit residual {residual:.3g} exceeds {FIT_RESIDUAL_MAX}")
    return fit
