"""Fields on a truncated cone (0, R] x Y stored mode by mode.

A field keeps, for every retained cross-section mode, either its radial
profile a(r_k) on that mode's Bessel-zero nodes or its Hankel transform
b(rho_k) on the frequency nodes. Modes with equal order share one plan.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg

from .cross_section import ConeGeometry, CrossSectionModel
from .errors import DomainError, UnsupportedEvaluation
from .hankel import plan_dht

RADIAL = "radial"
SPECTRAL = "spectral"
BAND_FRACTION = 0.05
BAND_TOL = 1e-8


@dataclass(eq=False)
class ConeGrid:
    """Per-mode Hankel plans for a geometry truncated at R_max with N nodes."""
    geometry: ConeGeometry
    R_max: float
    N: int
    _phys: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if isinstance(self.geometry, CrossSectionModel):
            self.geometry = ConeGeometry(self.geometry)
        nu = self.model.nu
        keys, inverse = np.unique(np.round(nu, 12), return_inverse=True)
        self.plan_orders = [float(np.mean(nu[inverse == i])) for i in range(len(keys))]
        self.mode_plan = inverse.astype(int)
        self.plan_modes = [np.nonzero(inverse == i)[0] for i in range(len(keys))]
        self.plans = [plan_dht(v, self.n, self.R_max, self.N) for v in self.plan_orders]

    @property
    def model(self):
        return self.geometry.cross_section

    @property
    def n(self):
        return self.geometry.n

    @property
    def num_modes(self):
        return self.model.num_modes

    @cached_property
    def radial_scale(self):
        return np.stack([self.plans[p].radial_scale for p in self.mode_plan])

    @cached_property
    def frequency_scale(self):
        return np.stack([self.plans[p].frequency_scale for p in self.mode_plan])

    @cached_property
    def frequency_nodes(self):
        """(modes, N) array of rho_k per mode."""
        return np.stack([self.plans[p].frequency_nodes for p in self.mode_plan])

    @cached_property
    def radial_nodes(self):
        return np.stack([self.plans[p].radial_nodes for p in self.mode_plan])

    @property
    def rho_max(self):
        return float(self.frequency_nodes[:, -1].max())

    def transform(self, x):
        """Apply each mode's orthogonal involution to scaled coefficients."""
        out = np.empty_like(x, dtype=np.result_type(x, float))
        for p, idx in enumerate(self.plan_modes):
            out[idx] = x[idx] @ self.plans[p].matrix
        return out

    def physical(self, degree=None):
        """Shared uniform radial grid times a Y quadrature, cached by degree."""
        key = degree
        if key not in self._phys:
            self._phys[key] = PhysicalGrid(self, degree)
        return self._phys[key]

    def zeros(self, representation=SPECTRAL):
        return ConeField(self, representation, np.zeros((self.num_modes, self.N), complex))

    def from_scaled(self, c):
        """Field from scaled spectral coefficients (modes, N)."""
        return ConeField(self, SPECTRAL, np.asarray(c) / self.frequency_scale)


@dataclass(frozen=True, eq=False)
class ConeField:
    """Function on the truncated cone as per-mode coefficient rows."""
    grid: ConeGrid
    representation: str
    coeffs: np.ndarray

    def __post_init__(self):
        if self.representation not in (RADIAL, SPECTRAL):
            raise DomainError(f"unknown representation {self.representation!r}")
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.grid.num_modes, self.grid.N):
            raise DomainError(f"coefficients must have shape {(self.grid.num_modes, self.grid.N)}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def geometry(self):
        return self.grid.geometry

    def scaled(self):
        """Orthonormal coordinates in the current representation."""
        s = self.grid.radial_scale if self.representation == RADIAL else self.grid.frequency_scale
        return self.coeffs * s

    def scaled_spectral(self):
        return self.to_spectral().scaled()

    def to_spectral(self):
        if self.representation == SPECTRAL:
            return self
        c = self.grid.transform(self.coeffs * self.grid.radial_scale)
        return ConeField(self.grid, SPECTRAL, c / self.grid.frequency_scale)

    def to_radial(self):
        if self.representation == RADIAL:
            return self
        x = self.grid.transform(self.coeffs * self.grid.frequency_scale)
        return ConeField(self.grid, RADIAL, x / self.grid.radial_scale)

    def mode_norms(self):
        """||a_j||_{L^2(r^{n-1} dr)} per mode."""
        return np.linalg.norm(self.scaled(), axis=1)

    def norm(self):
        """L^2(X) norm as the root of the sum of squared mode norms."""
        return float(np.sqrt(np.sum(np.abs(self.scaled()) ** 2)))

    def __add__(self, other):
        _same_grid(self, other)
        a, b = self.to_spectral(), other.to_spectral()
        return ConeField(self.grid, SPECTRAL, a.coeffs + b.coeffs)

    def __sub__(self, other):
        _same_grid(self, other)
        a, b = self.to_spectral(), other.to_spectral()
        return ConeField(self.grid, SPECTRAL, a.coeffs - b.coeffs)

    def __mul__(self, scalar):
        return ConeField(self.grid, self.representation, self.coeffs * scalar)

    __rmul__ = __mul__

    def band_tail_fraction(self):
        """Share of L^2 mass in the top 5% of frequency coefficients."""
        c = np.abs(self.scaled_spectral()) ** 2
        total = c.sum()
        if total == 0:
            return 0.0
        k0 = int(np.floor((1 - BAND_FRACTION) * self.grid.N))
        return float(c[:, k0:].sum() / total)

    def is_resolved(self):
        return self.band_tail_fraction() < BAND_TOL


def _same_grid(a, b):
    if a.grid is not b.grid:
        raise DomainError("fields live on different grids")


def _mode_samples(grid, u, degree):
    """Per-plan samples of u on (plan radial nodes) x (Y nodes)."""
    pts, w = grid.model.quadrature(degree)
    Phi = grid.model.evaluate(pts)
    out = []
    for p, plan in enumerate(grid.plans):
        if callable(u):
            vals = np.asarray(u(plan.radial_nodes[:, None], pts[None, :, :]), dtype=complex)
            vals = np.broadcast_to(vals, (grid.N, len(pts)))
        else:
            vals = np.asarray(u[p], dtype=complex)
            if vals.shape != (grid.N, len(pts)):
                raise DomainError("sample array does not match the tensor grid")
        out.append(vals)
    return out, w, Phi


def project_modes(grid, u, degree=None):
    """Project pointwise data onto the retained modes.

    `u` is either a callable u(r, y) broadcasting r of shape (N, 1) against
    unit vectors y of shape (1, Q, n), or a sequence with one (N, Q) sample
    array per plan taken at that plan's radial nodes and the Y nodes of
    `grid.model.quadrature(degree)`. Returns a field in radial form with
    a_j(r_k) = sum_q w_q u(r_k, y_q) phi_j(y_q).
    """
    if not grid.model.supports_evaluation:
        raise UnsupportedEvaluation("projection needs pointwise eigenfunctions")
    samples, w, Phi = _mode_samples(grid, u, degree)
    coeffs = np.zeros((grid.num_modes, grid.N), complex)
    for p, idx in enumerate(grid.plan_modes):
        coeffs[idx] = ((samples[p] * w) @ Phi[:, idx].conj()).T
    return ConeField(grid, RADIAL, coeffs)


def radial_profiles(field, r):
    """Per-mode radial profiles a_j(r) at arbitrary radii, shape (modes, len(r)).

    Off the node grid a profile is evaluated from its Fourier-Bessel series,
    which is exact for band-limited profiles on (0, R_max].
    """
    grid = field.grid
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r > grid.R_max * (1 + 1e-12)) or np.any(r < 0):
        raise DomainError("radius outside (0, R_max]: extrapolation is not supported")
    c = field.scaled_spectral()
    out = np.empty((grid.num_modes, len(r)), complex)
    for p, idx in enumerate(grid.plan_modes):
        S = grid.plans[p].synthesis_matrix(r)
        out[idx] = c[idx] @ S.T
    return out


def reconstruct_field(field, r, y):
    """u(r_m, y_m) = sum_j a_j(r_m) phi_j(y_m) at paired points."""
    model = field.grid.model
    if not model.supports_evaluation:
        raise UnsupportedEvaluation("reconstruction needs pointwise eigenfunctions")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if len(y) == 1 and len(r) > 1:
        y = np.repeat(y, len(r), axis=0)
    A = radial_profiles(field, r)
    Phi = model.evaluate(y)
    return np.einsum("jm,mj->m", A, Phi)


class PhysicalGrid:
    """Uniform radial grid r_i = i R/(N+1) times the Y quadrature nodes.

    Used wherever a field must be seen pointwise: nonlinear terms, L^p
    norms and potentials. Radial weights h r_i^{n-1} make the composite
    trapezoid rule for int g r^{n-1} dr. For each plan `synthesis` holds
    the exact Fourier-Bessel evaluation on the grid and `orthogonal` its
    polar factor, a square orthogonal map used when a round trip through
    the grid has to preserve the L^2 norm exactly.
    """

    def __init__(self, grid, degree=None):
        self.grid = grid
        model = grid.model
        N, R = grid.N, grid.R_max
        h = R / (N + 1)
        self.r = h * np.arange(1, N + 1)
        self.radial_weights = h * self.r ** (grid.n - 1)
        self.sqrt_w = np.sqrt(self.radial_weights)
        self.synthesis = []
        self._orth = [None] * len(grid.plans)
        for plan in grid.plans:
            self.synthesis.append(plan.synthesis_matrix(self.r))
        if model.supports_evaluation:
            self.nodes, self.weights = model.quadrature(degree)
            self.Phi = model.evaluate(self.nodes)
        else:
            self.nodes = self.weights = self.Phi = None

    def orthogonal(self, p):
        if self._orth[p] is None:
            B = self.synthesis[p] * self.sqrt_w[:, None]
            # divide-and-conquer SVD can fail to converge on these matrices
            U, _, Vt = linalg.svd(B, lapack_driver="gesvd")
            self._orth[p] = U @ Vt
        return self._orth[p]

    def profiles(self, field, exact=True):
        """Radial profiles on the uniform grid, shape (modes, N)."""
        c = field.scaled_spectral()
        out = np.empty(c.shape, complex)
        for p, idx in enumerate(self.grid.plan_modes):
            if exact:
                out[idx] = c[idx] @ self.synthesis[p].T
            else:
                out[idx] = (c[idx] @ self.orthogonal(p).T) / self.sqrt_w
        return out

    def field_from_profiles(self, prof):
        """Project grid profiles (modes, N) back onto each mode's plan."""
        c = np.empty(prof.shape, complex)
        g = prof * self.sqrt_w
        for p, idx in enumerate(self.grid.plan_modes):
            c[idx] = g[idx] @ self.orthogonal(p)
        return self.grid.from_scaled(c)

    def values(self, field, exact=True):
        """u on the tensor grid, shape (N radial, Q angular)."""
        return self.profiles(field, exact).T @ self.Phi.T

    def profiles_from_values(self, vals):
        return ((vals * self.weights) @ self.Phi).T

    def lp_norm(self, vals, p):
        """||u||_{L^p(X)} from tensor-grid values by the product rule."""
        a = np.abs(vals)
        if np.isinf(p):
            return float(a.max())
        return float(np.sum(self.radial_weights[:, None] * self.weights[None, :] * a ** p) ** (1 / p))
