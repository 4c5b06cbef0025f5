"""Discrete order-nu Hankel transform on Bessel-zero grids.

The continuum transform is

    H f(rho) = rho^{-(n-2)/2} int_0^inf J_nu(r rho) [r^{(n-2)/2} f(r)] r dr,

an involution from L^2(r^{n-1} dr) to L^2(rho^{n-1} d rho). On (0, R] it
is sampled at r_k = j_k R / j_{N+1} and rho_k = j_k / R. In weight-scaled
coordinates the quasi-discrete kernel

    T_{kl} = 2 J_nu(j_k j_l / j_{N+1}) / (j_{N+1} |J_{nu+1}(j_k)| |J_{nu+1}(j_l)|)

is symmetric and T^2 = I up to a small defect. The plan stores the
orthogonal polar factor sign(T) instead, which keeps the sampled values
within that defect of the quadrature transform while making the discrete
map an exact orthogonal involution.
"""
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError
from .specfun import bessel_j_zeros

MAX_N = 10000


@dataclass(eq=False)
class HankelPlan:
    order: float
    n: int
    R_max: float
    N: int
    zeros: np.ndarray
    _kernel: np.ndarray = field(default=None, repr=False)
    _matrix: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        j = self.zeros
        jN1 = j[self.N]
        jk = j[: self.N]
        self.radial_nodes = jk * self.R_max / jN1
        self.frequency_nodes = jk / self.R_max
        amp = np.abs(special.jv(self.order + 1, jk))
        self._amp = amp
        # quadrature weights for int g(r) r dr and int h(rho) rho d rho
        self.radial_weights = 2 * self.R_max ** 2 / (jN1 ** 2 * amp ** 2)
        self.frequency_weights = 2 / (self.R_max ** 2 * amp ** 2)
        h = (self.n - 2) / 2
        self.radial_scale = np.sqrt(self.radial_weights) * self.radial_nodes ** h
        self.frequency_scale = np.sqrt(self.frequency_weights) * self.frequency_nodes ** h
        for arr in (self.radial_nodes, self.frequency_nodes, self.radial_weights,
                    self.frequency_weights, self.radial_scale, self.frequency_scale):
            arr.setflags(write=False)

    @property
    def key(self):
        return (float(self.order), int(self.n), float(self.R_max), int(self.N))

    @property
    def rho_max(self):
        return float(self.frequency_nodes[-1])

    @property
    def kernel(self):
        """Raw quasi-discrete kernel T (symmetric, nearly involutive)."""
        if self._kernel is None:
            j = self.zeros
            jN1 = j[self.N]
            jk = j[: self.N]
            K = special.jv(self.order, np.outer(jk, jk) / jN1)
            K *= 2 / jN1
            K /= self._amp[:, None]
            K /= self._amp[None, :]
            self._kernel = 0.5 * (K + K.T)
        return self._kernel

    @property
    def matrix(self):
        """Orthogonal symmetric involution used by forward and inverse."""
        if self._matrix is None:
            w, V = np.linalg.eigh(self.kernel)
            U = (V * np.sign(w)) @ V.T
            U = 0.5 * (U + U.T)
            U.setflags(write=False)
            self._matrix = U
        return self._matrix

    def kernel_defect(self):
        """Spectral norm of T^2 - I for the raw kernel."""
        w = np.linalg.eigvalsh(self.kernel)
        return float(np.max(np.abs(w * w - 1)))

    # scaled coordinates: x = radial_scale * a, c = frequency_scale * b,
    # with ||x||_2 = ||a||_{L^2(r^{n-1}dr)} and c = matrix @ x
    def to_scaled_radial(self, a):
        return self.radial_scale * a

    def to_scaled_frequency(self, b):
        return self.frequency_scale * b

    def basis(self, r):
        """Orthonormal Dirichlet eigenfunctions e_k(r) of the phi variable.

        Returns shape (len(r), N); phi(r) = r^{(n-2)/2} a(r) = sum_k c_k e_k(r).
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(r < 0) or np.any(r > self.R_max * (1 + 1e-12)):
            raise DomainError("radius outside (0, R_max]")
        E = special.jv(self.order, np.outer(r, self.frequency_nodes))
        E *= np.sqrt(2) / (self.R_max * self._amp)
        return E

    def synthesis_matrix(self, r):
        """Matrix S with a(r) = S @ c for scaled frequency coefficients c."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        h = (self.n - 2) / 2
        with np.errstate(divide="ignore"):
            pre = np.where(r > 0, r ** (-h), 0.0) if h > 0 else np.ones_like(r)
        return self.basis(r) * pre[:, None]


def plan_dht(nu, n, R_max, N, cache_dir=None):
    """Build (or fetch from the in-memory or on-disk cache) an order-nu plan."""
    nu = float(nu)
    if not nu > 0 or nu > 200:
        raise DomainError("plan order must lie in (0, 200]")
    if int(n) != n or n < 2:
        raise DomainError("cone dimension must be an integer >= 2")
    if not R_max > 0:
        raise DomainError("R_max must be positive")
    if int(N) != N or not 1 <= N <= MAX_N:
        raise DomainError(f"N must lie in [1, {MAX_N}]")
    key = (nu, int(n), float(R_max), int(N))
    plan = _PLANS.get(key)
    if plan is not None:
        return plan
    cache_dir = cache_dir or os.environ.get("CONEWAVE_PLAN_CACHE")
    path = plan_cache_path(cache_dir, *key) if cache_dir else None
    if path and os.path.exists(path):
        plan = load_plan(path)
    else:
        zeros = bessel_j_zeros(nu, int(N) + 1).zeros
        plan = HankelPlan(nu, int(n), float(R_max), int(N), zeros)
        if path:
            save_plan(plan, path)
    _PLANS[key] = plan
    return plan


_PLANS = {}


def clear_plan_cache():
    _PLANS.clear()


def plan_cache_path(cache_dir, nu, n, R_max, N):
    name = f"dht_nu{nu!r}_n{n}_R{R_max!r}_N{N}.npz"
    return os.path.join(cache_dir, name)


def save_plan(plan, path):
    """Write zeros and the orthogonal transform matrix to an .npz file."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    np.savez(path, key=np.array(plan.key), zeros=plan.zeros, matrix=plan.matrix)


def load_plan(path):
    with np.load(path) as data:
        nu, n, R_max, N = data["key"]
        plan = HankelPlan(float(nu), int(n), float(R_max), int(N), data["zeros"].copy())
        U = data["matrix"].copy()
        U.setflags(write=False)
        plan._matrix = U
    return plan


def _check_length(plan, samples):
    samples = np.asarray(samples)
    if samples.shape[-1] != plan.N:
        raise DomainError(f"expected {plan.N} samples, got {samples.shape[-1]}")
    return samples


def hankel_forward(plan, samples):
    """Radial samples a(r_k) -> frequency samples b(rho_k).

    Works along the last axis, so a stack of profiles can be passed at once.
    """
    a = _check_length(plan, samples)
    x = a * plan.radial_scale
    return (x @ plan.matrix) / plan.frequency_scale


def hankel_inverse(plan, samples):
    """Frequency samples b(rho_k) -> radial samples a(r_k)."""
    b = _check_length(plan, samples)
    c = b * plan.frequency_scale
    return (c @ plan.matrix) / plan.radial_scale


def radial_norm(plan, a):
    """||a||_{L^2(r^{n-1} dr)} by the plan's quadrature."""
    return float(np.linalg.norm(plan.radial_scale * a))


def frequency_norm(plan, b):
    """||b||_{L^2(rho^{n-1} d rho)} by the plan's quadrature."""
    return float(np.linalg.norm(plan.frequency_scale * b))
