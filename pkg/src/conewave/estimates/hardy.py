"""Hardy inequalities for L_V and the one-dimensional weighted Hardy lemma."""
import numpy as np
from scipy import integrate

from ..errors import DomainError, POutOfRange, SOutOfRange
from ..fields import ConeGrid
from .ensembles import random_ensemble
from .radial import radial_gram
from .report import QuotientReport, stable

CERTIFIED = "certified"
EXPERIMENTAL = "experimental"


def hardy_s_limit(nu0):
    return min(1 + nu0, 2.0)


def hardy_p_window(n, s, nu0):
    """Open interval of p for ||r^{-s} f||_p <~ ||L^{s/2} f||_p, intersected with (1, inf)."""
    lo = n / min(1 + n / 2 + nu0, n)
    den = max(s + n / 2 - 1 - nu0, 0.0)
    hi = np.inf if den == 0 else n / den
    return max(lo, 1.0), hi


def check_hardy(n, s, p, nu0):
    if not 0 < s < hardy_s_limit(nu0):
        raise SOutOfRange(f"s = {s} must lie in (0, {hardy_s_limit(nu0):.6g})")
    lo, hi = hardy_p_window(n, s, nu0)
    if not (lo < p < hi) or np.isinf(p):
        raise POutOfRange(f"p = {p} must lie in ({lo:.6g}, {hi:.6g})")


def sharp_mode_constant(nu, s):
    """Best constant of ||r^{-s} f|| <= C ||L^{s/2} f|| in L^2 on one mode of order nu."""
    from scipy.special import gammaln
    return 2.0 ** (-s) * np.exp(gammaln((nu + 1 - s) / 2) - gammaln((nu + 1 + s) / 2))


def _quotients_l2(ensemble, s):
    grid = ensemble.grid
    c = ensemble.scaled()
    num = np.zeros(ensemble.size)
    for p, idx in enumerate(grid.plan_modes):
        G = radial_gram(grid.plans[p], 1 - 2 * s)
        cp = c[:, idx, :]
        num += np.einsum("skl,lm,skm->s", cp.conj(), G, cp).real
    den = np.sum(np.abs(c * grid.frequency_nodes[None] ** s) ** 2, axis=(1, 2))
    return np.sqrt(num / den)


def _quotients_lp(ensemble, s, p):
    grid = ensemble.grid
    ph = grid.physical(max(2 * grid.model.L_max, int(np.ceil(p)) * grid.model.L_max))
    out = np.empty(ensemble.size)
    for i, f in enumerate(ensemble):
        u = ph.values(f)
        Lu = ph.values(f.__class__(grid, f.representation, f.coeffs * grid.frequency_nodes ** s))
        out[i] = ph.lp_norm(u * ph.r[:, None] ** (-s), p) / ph.lp_norm(Lu, p)
    return out


def hardy_quotient(grid, s, p=2, ensemble=None, seed=0):
    """sup ||r^{-s} f||_p / ||L^{s/2} f||_p over an ensemble, and at doubled N.

    For p = 2 the weighted norm is an exact quadratic form in the spectral
    coefficients and the Sobolev norm is spectral; other p
    are evaluated on the uniform reconstruction grid and flagged experimental.
    """
    check_hardy(grid.n, s, p, grid.model.nu0)
    if ensemble is None:
        ensemble = random_ensemble(grid, seed=seed)
    fine = ensemble.regrid(ConeGrid(grid.geometry, grid.R_max, 2 * grid.N))
    if p == 2:
        base, doubled = _quotients_l2(ensemble, s), _quotients_l2(fine, s)
        mode = CERTIFIED
    else:
        base, doubled = _quotients_lp(ensemble, s, p), _quotients_lp(fine, s, p)
        mode = EXPERIMENTAL
    sup, sup2 = float(base.max()), float(doubled.max())
    return QuotientReport("hardy", {"s": s, "p": p, "n": grid.n, "N": grid.N},
                          ensemble.size, sup, sup2, stable(sup, sup2),
                          tuple(map(float, base)), {"mode": mode})


def single_mode_hardy(grid, mode, s, profile):
    """||r^{-s} f|| / ||L^{s/2} f|| for f = profile(r) times one eigenfunction."""
    check_hardy(grid.n, s, 2, grid.model.nu0)
    plan = grid.plans[grid.mode_plan[mode]]
    c = (plan.radial_scale * profile(plan.radial_nodes)) @ plan.matrix
    num = np.sqrt(np.real(c.conj() @ radial_gram(plan, 1 - 2 * s) @ c))
    return float(num / np.linalg.norm(c * plan.frequency_nodes ** s))


# ---------------------------------------------------------------------------
# weighted Hardy on the half line


def hardy_weight(tau, r):
    return np.exp(-tau * r) * np.sqrt(1 + 2 * r * tau)


def central_derivative(g, h=1e-4, rel=1e-3):
    """Fourth-order central difference with a step shrinking near the origin."""
    def dg(r):
        r = np.asarray(r, dtype=float)
        hh = np.minimum(h, rel * r) if np.ndim(r) else min(h, rel * r)
        return (g(r - 2 * hh) - 8 * g(r - hh) + 8 * g(r + hh) - g(r + 2 * hh)) / (12 * hh)
    return dg


LOG_CAP = 600.0
LOG_FIT = 40.0


def _half_line(f, upper, **kw):
    """int_0^upper f dr with (0, 1] mapped by r = e^{-x}.

    Near-extremal profiles behave like r^{2 eps - 1} at the origin; in the
    log variable that is e^{-2 eps x}, which decays too slowly to truncate.
    The integral runs to x = LOG_CAP and the rest is closed with the
    exponential tail fitted over the last LOG_FIT units.
    """
    head_end = min(1.0, upper)

    def mapped(x):
        r = head_end * np.exp(-x)
        return f(r) * r

    head = integrate.quad(mapped, 0, LOG_CAP, **kw)[0]
    f_cap, f_fit = mapped(LOG_CAP), mapped(LOG_CAP - LOG_FIT)
    if f_cap > 0 and f_fit > f_cap:
        head += f_cap * LOG_FIT / np.log(f_fit / f_cap)
    if upper <= 1.0:
        return head
    return head + integrate.quad(f, 1.0, upper, **kw)[0]


def weighted_hardy_terms(tau, g, dg=None, upper=np.inf):
    """(int w^2 |g|^2 / r^2 dr, int w^2 |g'|^2 dr) over (0, upper)."""
    if tau < 0:
        raise DomainError("tau must be non-negative")
    if abs(g(0.0)) > 1e-12:
        raise DomainError("the profile must vanish at r = 0")
    dg = central_derivative(g) if dg is None else dg
    kw = dict(limit=400, epsabs=0.0, epsrel=1e-12)
    lhs = _half_line(lambda r: (hardy_weight(tau, r) * g(r) / r) ** 2, upper, **kw)
    rhs = _half_line(lambda r: (hardy_weight(tau, r) * dg(r)) ** 2, upper, **kw)
    return lhs, rhs


def weighted_hardy_check(tau, g, dg=None, upper=np.inf):
    """LHS / RHS of the weighted Hardy inequality; the lemma asserts <= 4."""
    lhs, rhs = weighted_hardy_terms(tau, g, dg, upper)
    return lhs / rhs
