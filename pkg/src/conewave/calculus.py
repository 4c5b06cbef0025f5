"""Functional calculus of the cone operator L_V and its closed-form kernels.

On every mode L_V acts as multiplication by rho^2 after the order-nu
Hankel transform, so F(L_V) is a diagonal multiplier on spectral
coefficients. The propagator follows i u_t + L_V u = 0, i.e.
u(t) = e^{i t L_V} u_0 with multiplier e^{i t rho^2}.
"""
from dataclasses import dataclass

import numpy as np
from scipy import special

from .cross_section import ConeGeometry, build_flat_sphere, hormander_ratio
from .errors import DomainError, TailNotConverged, UnsupportedEvaluation
from .fields import (RADIAL, SPECTRAL, ConeField, ConeGrid, PhysicalGrid, project_modes,
                     radial_profiles, reconstruct_field)

__all__ = [
    "ConeField", "ConeGrid", "PhysicalGrid", "SpectralMultiplier", "KernelValue",
    "project_modes", "reconstruct_field", "radial_profiles", "apply_spectral_multiplier",
    "propagate", "sobolev_norm", "spectral_measure_kernel", "resolvent_kernel",
    "duhamel_residual", "change_geometry", "potential_action", "RADIAL", "SPECTRAL",
    "DUHAMEL_SIGN", "TAIL_RTOL", "spectral_measure_density", "propagator_consistency",
    "ConsistencyCheck", "SPECTRAL_MEASURE_PREFACTOR",
]

TAIL_RTOL = 1e-6
# u(t) = e^{itL0}u0 + DUHAMEL_SIGN * i * int_0^t e^{i(t-s)L0} V u(s) ds,
# fixed by differentiating both sides at t = 0: u_t = i(L0 + V)u
DUHAMEL_SIGN = +1


@dataclass(frozen=True)
class SpectralMultiplier:
    """Diagonal multiplier; `symbol` maps frequency rho to F(rho^2)."""
    symbol: object
    description: str = ""

    @classmethod
    def of_energy(cls, F, description=""):
        """Multiplier F(L_V), given F as a function of the energy rho^2."""
        return cls(lambda rho: F(rho * rho), description)

    def __call__(self, rho):
        return np.asarray(self.symbol(rho))

    def __mul__(self, other):
        return SpectralMultiplier(lambda rho: self(rho) * other(rho),
                                  f"({self.description})*({other.description})")


def apply_spectral_multiplier(field, F):
    """b_j(rho_k) <- F(rho_k^2) b_j(rho_k), returned in spectral form."""
    spec = field.to_spectral()
    vals = np.broadcast_to(F(spec.grid.frequency_nodes), spec.coeffs.shape)
    if not np.all(np.isfinite(vals)):
        raise DomainError("multiplier is not finite on the frequency grid")
    return ConeField(spec.grid, SPECTRAL, spec.coeffs * vals)


def propagate(field, t, conjugate_time=False):
    """e^{i t L_V} field; `conjugate_time` flips to e^{-i t L_V}."""
    sign = -1.0 if conjugate_time else 1.0
    spec = field.to_spectral()
    phase = np.exp(1j * sign * t * spec.grid.frequency_nodes ** 2)
    return ConeField(spec.grid, SPECTRAL, spec.coeffs * phase)


def sobolev_norm(field, s, homogeneous=True):
    """||rho^s b||_2 (homogeneous) or ||(1 + rho^2)^{s/2} b||_2."""
    c = field.scaled_spectral()
    rho = field.grid.frequency_nodes
    w = rho ** s if homogeneous else (1 + rho * rho) ** (s / 2)
    return float(np.sqrt(np.sum(np.abs(c * w) ** 2)))


# ---------------------------------------------------------------------------
# kernels as truncated mode sums with explicit tail bounds


@dataclass(frozen=True)
class KernelValue:
    value: float
    tail_bound: float
    terms: int

    def __float__(self):
        return float(self.value)


def _unit(y):
    y = np.asarray(y, dtype=float)
    return y / np.linalg.norm(y)


def _angular_products(model, y, yp):
    Phi = model.evaluate(np.stack([_unit(y), _unit(yp)]))
    return Phi[0] * Phi[1].conj()


def _sphere_dim(m, ell):
    """Dimension of degree-ell harmonics on S^m."""
    if ell == 0:
        return 1
    if m == 1:
        return 2
    return (2 * ell + m - 1) * special.comb(ell + m - 2, ell, exact=True) // (m - 1)


def _tail_shells(model, extra):
    """(nu lower bound, bound on sum over shell of |phi(y)||phi(y')|) beyond L_max.

    On the round sphere the shell sum is dim/|S^m| (addition theorem). For a
    bounded zonal potential the eigenvalues of a shell move by at most |a|,
    and the shell sum is bounded with the Hormander ratio of the model.
    """
    m = model.n - 1
    area = 2 * np.pi ** ((m + 1) / 2) / special.gamma((m + 1) / 2)
    a = abs(model.params.get("a", 0.0))
    ch = None if model.kind == "flat" else hormander_ratio(model)
    out = []
    for ell in range(model.L_max + 1, model.L_max + 1 + extra):
        lam = ell * (ell + m - 1) - a
        nu = np.sqrt(max(lam, 0.0) + (model.n - 2) ** 2 / 4)
        dim = _sphere_dim(m, ell)
        if ch is None:
            amp = dim / area
        else:
            amp = dim * ch ** 2 * (nu + 1) ** (model.n - 1)
        out.append((nu, amp))
    return out


def _check_points(geometry, z, zp):
    model = geometry.cross_section
    if not model.supports_evaluation:
        raise UnsupportedEvaluation("kernels need pointwise eigenfunctions")
    (r, y), (rp, yp) = z, zp
    if r <= 0 or rp <= 0:
        raise DomainError("kernel points need r > 0")
    return model, float(r), float(rp), y, yp


SPECTRAL_MEASURE_PREFACTOR = {"lemma": np.pi / 2, "propagator": 1.0}


def spectral_measure_density(model, lam, r, rp, prods, normalization="lemma"):
    """Truncated dE(lam; (r, y), (r', y')) on arrays lam (L,) and r' (P,).

    `prods` holds phi_j(y) phi_j(y') per mode. Returns shape (L, P).
    """
    pre = SPECTRAL_MEASURE_PREFACTOR[normalization]
    n = model.n
    lam = np.asarray(lam, dtype=float)[:, None]
    rp = np.asarray(rp, dtype=float)[None, :]
    out = np.zeros(np.broadcast_shapes(lam.shape, rp.shape))
    for nu in np.unique(model.nu):
        w = float(np.sum(prods[model.nu == nu]).real)
        out += w * special.jv(nu, lam * r) * special.jv(nu, lam * rp)
    return pre * lam ** (n - 1) * (lam * lam * r * rp) ** (-(n - 2) / 2) * out


def spectral_measure_kernel(geometry, lam, z, zp, normalization="lemma", strict=True):
    """Spectral measure density dE(lam; z, z') of sqrt(L_V).

    dE(lam; z, z') = pre * lam^{n-1} (lam^2 r r')^{-(n-2)/2}
                     * sum_j phi_j(y) phi_j(y') J_nu(lam r) J_nu(lam r')

    with pre = pi/2 for the unit-energy formula of the spectral-measure
    lemma ("lemma") or pre = 1, the value consistent with the Hankel
    functional calculus ("propagator"). The tail beyond L_max is bounded
    with |J_nu(x)| <= (x/2)^nu / Gamma(nu + 1).
    """
    model, r, rp, y, yp = _check_points(geometry, z, zp)
    if lam <= 0:
        raise DomainError("lam must be positive")
    pre = SPECTRAL_MEASURE_PREFACTOR[normalization]
    n = model.n
    x, xp = lam * r, lam * rp
    scale = pre * lam ** (n - 1) * (x * xp) ** (-(n - 2) / 2)
    prods = _angular_products(model, y, yp)
    terms = special.jv(model.nu, x) * special.jv(model.nu, xp) * prods
    partial = scale * float(np.sum(terms))
    tail = 0.0
    for nu, amp in _tail_shells(model, 4000):
        logt = nu * np.log(x * xp / 4) - 2 * special.gammaln(nu + 1)
        term = amp * np.exp(logt)
        tail += term
        if nu > 2 * max(x, xp) and term < 1e-18 * max(abs(partial / scale), 1e-300):
            break
    else:
        tail = np.inf
    tail *= scale
    if strict and tail > TAIL_RTOL * abs(partial):
        raise TailNotConverged(
            f"tail bound {tail:.3g} exceeds {TAIL_RTOL:g} of partial sum {partial:.3g}",
            partial, tail)
    return KernelValue(partial, float(tail), model.num_modes)


def resolvent_kernel(geometry, k, z, zp, strict=True):
    """Kernel of (L_V + k^2)^{-1} as a mode sum.

    G(z, z') = (r r')^{-(n-2)/2} sum_j phi_j(y) phi_j(y') I_nu(k r_<) K_nu(k r_>).

    The tail uses I_nu(x) K_nu(y) <= (x/y)^nu / (2 nu) for x <= y.
    """
    model, r, rp, y, yp = _check_points(geometry, z, zp)
    if k <= 0:
        raise DomainError("k must be positive")
    if r == rp and np.allclose(_unit(y), _unit(yp)):
        raise DomainError("resolvent kernel is singular on the diagonal")
    n = model.n
    lo, hi = k * min(r, rp), k * max(r, rp)
    prods = _angular_products(model, y, yp)
    ik = special.ive(model.nu, lo) * special.kve(model.nu, hi) * np.exp(lo - hi)
    scale = (r * rp) ** (-(n - 2) / 2)
    partial = scale * float(np.sum(ik * prods))
    ratio = lo / hi
    tail = 0.0
    if ratio < 1:
        for nu, amp in _tail_shells(model, 20000):
            term = amp * ratio ** nu / (2 * nu)
            tail += term
            if term < 1e-18 * max(abs(partial / scale), 1e-300):
                break
        else:
            tail = np.inf
    else:
        tail = np.inf
    tail *= scale
    if strict and tail > TAIL_RTOL * abs(partial):
        raise TailNotConverged(
            f"tail bound {tail:.3g} exceeds {TAIL_RTOL:g} of partial sum {partial:.3g}",
            partial, tail)
    return KernelValue(partial, float(tail), model.num_modes)


@dataclass(frozen=True)
class ConsistencyCheck:
    kernel_value: complex
    propagated_value: complex

    @property
    def ratio(self):
        """kernel / propagated; pi/2 under the lemma normalization."""
        return self.kernel_value / self.propagated_value

    @property
    def relative_error(self):
        return abs(self.kernel_value - self.propagated_value) / abs(self.propagated_value)


def propagator_consistency(grid, t, z, r0, y0, width, normalization="propagator",
                           points=600):
    """int_0^Lambda e^{it lam^2} dE(lam) applied to a narrow bump vs propagate.

    The bump is g(r') sum_j phi_j(y0) phi_j(y'), g a Gaussian of the given
    width at r0, i.e. a radial Gaussian times the band-limited delta at y0.
    The kernel side integrates the truncated spectral measure by
    Gauss-Legendre quadrature in lam on [0, rho_max] and in r'; the other
    side is propagate on the Hankel grid, reconstructed at z.
    """
    model = grid.model
    n = model.n
    r, y = z
    g = lambda s: np.exp(-(s - r0) ** 2 / (2 * width ** 2))
    y0 = _unit(y0)
    phi0 = model.evaluate(y0[None, :])[0]
    prods = _angular_products(model, y, y0)
    lo, hi = max(r0 - 8 * width, 0.0), r0 + 8 * width
    x, w = np.polynomial.legendre.leggauss(points)
    lam = 0.5 * grid.rho_max * (x + 1)
    wl = 0.5 * grid.rho_max * w
    rp = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    wr = 0.5 * (hi - lo) * w * rp ** (n - 1) * g(rp)
    dens = spectral_measure_density(model, lam, r, rp, prods, normalization)
    kernel = np.exp(1j * t * lam ** 2) * wl @ dens @ wr
    coeffs = np.stack([g(grid.radial_nodes[j]) * phi0[j] for j in range(model.num_modes)])
    field = ConeField(grid, RADIAL, coeffs)
    value = reconstruct_field(propagate(field, t), [r], [_unit(y)])[0]
    return ConsistencyCheck(complex(kernel), complex(value))


# ---------------------------------------------------------------------------
# potentials and the Duhamel comparison


def _harmonic_coef(model):
    if model.kind == "custom":
        raise UnsupportedEvaluation("custom spectra have no harmonic expansion")
    return np.eye(model.num_modes) if model.coef is None else model.coef


def change_geometry(field, target_grid):
    """Re-expand a field in the modes of another model on the same sphere.

    Both models must use the same harmonic basis (same n and L_max). The
    radial profiles pass through the shared uniform grid.
    """
    src = field.grid
    if src.model.n != target_grid.model.n or src.model.L_max != target_grid.model.L_max:
        raise DomainError("models must share n and L_max")
    if src.R_max != target_grid.R_max or src.N != target_grid.N:
        raise DomainError("grids must share R_max and N")
    prof = src.physical().profiles(field)
    harm = _harmonic_coef(src.model) @ prof
    tgt = _harmonic_coef(target_grid.model).T @ harm
    return target_grid.physical().field_from_profiles(tgt)


def _cos_matrix(model):
    """Matrix of multiplication by cos(theta) in the harmonic basis (n = 3)."""
    from .cross_section import _sphere_harmonics, sphere_quadrature
    pts, w = sphere_quadrature(2, 2 * model.L_max + 1)
    Y = _sphere_harmonics(2, model.L_max, pts)
    M = Y.T @ (Y * (w * pts[:, 2])[:, None])
    return 0.5 * (M + M.T)


def potential_action(field, a, target_grid):
    """(a cos(theta) / r^2) field, expressed on `target_grid` (V = 0 model)."""
    src = field.grid
    ph = src.physical()
    prof = _harmonic_coef(src.model) @ ph.profiles(field)
    prof = a * (_cos_matrix(src.model) @ prof) / ph.r ** 2
    tgt = _harmonic_coef(target_grid.model).T @ prof
    return target_grid.physical().field_from_profiles(tgt)


def duhamel_residual(grid_V, u0, t, m, sign=DUHAMEL_SIGN):
    """|| e^{itL_V}u0 - e^{itL_0}u0 - sign*i int_0^t e^{i(t-s)L_0} V e^{isL_V}u0 ds ||_2.

    `grid_V` carries a dipole model (V = a cos(theta)/r^2, V = 0 for a = 0);
    the comparison model is the round sphere with the same L_max. `u0` is a
    field on `grid_V`. The time integral uses the midpoint rule on m steps.
    """
    model = grid_V.model
    if model.kind not in ("dipole", "flat"):
        raise UnsupportedEvaluation("Duhamel comparison needs a sphere-based model")
    a = float(model.params.get("a", 0.0))
    flat = ConeGrid(ConeGeometry(build_flat_sphere(model.n, model.L_max)), grid_V.R_max, grid_V.N)
    u0_flat = change_geometry(u0, flat)
    exact = change_geometry(propagate(u0, t), flat)
    total = propagate(u0_flat, t)
    if a != 0.0:
        ds = t / m
        acc = flat.zeros()
        for i in range(m):
            s = (i + 0.5) * ds
            src = potential_action(propagate(u0, s), a, flat)
            acc = acc + propagate(src, t - s)
        total = total + acc * (sign * 1j * ds)
    return (exact - total).norm()
