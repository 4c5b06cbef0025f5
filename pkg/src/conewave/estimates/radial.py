"""Weighted Gram matrices of a plan's Dirichlet basis.

For a weight r^gamma w(r) with gamma > -1 and smooth w, the matrix

    G_kl = int_0^R e_k(r) e_l(r) r^gamma w(r) dr

gives int |phi|^2 r^gamma w dr = c^H G c for phi = sum_k c_k e_k. Near the
apex e_k e_l = r^{2 nu} * (smooth), so the first panel uses Gauss-Jacobi
with the exact power r^{2 nu + gamma}; the rest use Gauss-Legendre panels
a little shorter than the shortest oscillation of e_k e_l.
"""
import numpy as np
from scipy import special

from ..errors import DomainError

PANEL_POINTS = 12
_GRAMS = {}


def _panel_rule(R, N, panels_per_node=0.5):
    m = max(int(np.ceil(N * panels_per_node)), 4)
    edges = np.linspace(0.0, R, m + 1)
    x, w = np.polynomial.legendre.leggauss(PANEL_POINTS)
    a, b = edges[1:-1], edges[2:]
    r = (0.5 * (b - a)[:, None] * x[None, :] + 0.5 * (a + b)[:, None]).ravel()
    wr = (0.5 * (b - a)[:, None] * w[None, :]).ravel()
    return edges[1], r, wr


def radial_gram(plan, gamma, smooth=None, tag=None):
    """G_kl = int_0^R e_k e_l r^gamma smooth(r) dr for the plan's basis."""
    nu = plan.order
    if not 2 * nu + gamma > -1:
        raise DomainError("weight is not integrable against the basis at the apex")
    key = (plan.key, float(gamma), tag)
    if smooth is None or tag is not None:
        if key in _GRAMS:
            return _GRAMS[key]
    a, r, wr = _panel_rule(plan.R_max, plan.N)
    x, w = special.roots_jacobi(2 * PANEL_POINTS, 0.0, 2 * nu + gamma)
    r0 = 0.5 * a * (1 + x)
    w0 = w * (a / 2) ** (2 * nu + gamma + 1)
    B0 = plan.basis(r0) / r0[:, None] ** nu
    B = plan.basis(r)
    wr = wr * r ** gamma
    if smooth is not None:
        w0 = w0 * smooth(r0)
        wr = wr * smooth(r)
    G = (B0.T * w0) @ B0 + (B.T * wr) @ B
    G = 0.5 * (G + G.T)
    if smooth is None or tag is not None:
        _GRAMS[key] = G
    return G


def clear_gram_cache():
    _GRAMS.clear()
