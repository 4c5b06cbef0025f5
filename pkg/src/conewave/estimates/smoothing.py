"""Local smoothing: weighted space-time L^2 norms of free evolutions.

The quantity int_0^T ||w(r) e^{itL} f||^2 dt is a quadratic form in the
scaled spectral coefficients. Per mode it equals

    sum_{l,m} c_l conj(c_m) G_{lm} E_{lm}(T),
    E_{lm}(T) = int_0^T e^{it(rho_l^2 - rho_m^2)} dt,

with G the weighted Gram matrix of the Dirichlet basis, so both the radial
and the time integral are exact.
"""
import numpy as np

from ..errors import BetaOutOfRange, DomainError
from .ensembles import random_ensemble, smooth_bump
from .radial import radial_gram
from .report import QuotientReport, stable

POWER = "power"
COMPACT = "compact"


def check_beta(beta, nu0):
    if not 0.5 < beta < 1 + nu0:
        raise BetaOutOfRange(f"beta = {beta} must satisfy 1/2 < beta < 1 + nu0 = {1 + nu0:.6g}")


def compact_weight(r):
    """Smooth weight supported in [0, 1), equal to 1 at the apex."""
    return smooth_bump(r)


def _time_factor(rho2, T):
    d = rho2[:, None] - rho2[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        E = np.where(d == 0, T, np.expm1(1j * T * d) / (1j * d))
    return E


def weighted_space_time_norms(ensemble, gram, multiplier, horizons):
    """sqrt(int_0^T ||w e^{itL} m(L) u_s||^2 dt) per member and horizon.

    `gram(plan)` returns the Gram matrix of w^2 r dr on the plan's basis and
    `multiplier` maps frequency nodes to m.
    """
    grid = ensemble.grid
    c = ensemble.scaled()
    out = np.zeros((len(horizons), ensemble.size))
    for p, idx in enumerate(grid.plan_modes):
        plan = grid.plans[p]
        M = gram(plan)
        cm = c[:, idx, :] * multiplier(plan.frequency_nodes)
        for h, T in enumerate(horizons):
            A = M * _time_factor(plan.frequency_nodes ** 2, T)
            out[h] += np.einsum("skl,lm,skm->s", cm, A, cm.conj()).real
    return np.sqrt(np.maximum(out, 0.0))


def local_smoothing_quotient(grid, alpha=0.0, s=0.0, beta=1.0, weight=POWER, T=8.0,
                             ensemble=None, seed=0):
    """sup ||w(r) d_t^alpha L^{s/2} u||_{L^2([0,T]; L^2)} / ||u_0||_{H^sigma}.

    Power weight w = r^{-beta} with sigma = 2 alpha + s + beta - 1; the
    compact weight has sigma = 0. d_t^alpha acts as the multiplier rho^{2 alpha}.
    """
    if not T > 0:
        raise DomainError("horizon T must be positive")
    if alpha < 0 or s < 0:
        raise DomainError("alpha and s must be non-negative")
    if weight == POWER:
        check_beta(beta, grid.model.nu0)
        gram = lambda plan: radial_gram(plan, 1 - 2 * beta)
        sigma = 2 * alpha + s + beta - 1
    elif weight == COMPACT:
        gram = lambda plan: radial_gram(plan, 1.0, lambda r: compact_weight(r) ** 2, tag=COMPACT)
        sigma = 0.0
    else:
        raise DomainError(f"unknown weight {weight!r}")
    if ensemble is None:
        ensemble = random_ensemble(grid, seed=seed)
    num = weighted_space_time_norms(ensemble, gram, lambda rho: rho ** (2 * alpha + s),
                                    [T, 2 * T])
    c = ensemble.scaled()
    den = np.sqrt(np.sum(np.abs(c * grid.frequency_nodes[None] ** sigma) ** 2, axis=(1, 2)))
    base, doubled = num[0] / den, num[1] / den
    sup, sup2 = float(base.max()), float(doubled.max())
    params = {"alpha": alpha, "s": s, "beta": beta if weight == POWER else "compact",
              "T": T, "n": grid.n}
    return QuotientReport("local-smoothing", params, ensemble.size, sup, sup2,
                          stable(sup, sup2), tuple(map(float, base)),
                          {"sobolev_index": sigma})
