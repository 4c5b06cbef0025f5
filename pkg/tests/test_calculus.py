import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from conewave import (ConeGeometry, ConeGrid, apply_spectral_multiplier, build_dipole_sphere,
                      build_flat_sphere, project_modes, propagate, reconstruct_field,
                      resolvent_kernel, sobolev_norm)
from conewave.calculus import (SpectralMultiplier, _sphere_dim, duhamel_residual,
                               propagator_consistency, spectral_measure_kernel)
from conewave.cross_section import _sphere_labels
from conewave.errors import DomainError, TailNotConverged
from conewave.fields import RADIAL, SPECTRAL, ConeField

from oracles import free_gaussian


@pytest.fixture(scope="module")
def flat_grid():
    return ConeGrid(ConeGeometry(build_flat_sphere(3, 2)), 30.0, 128)


@pytest.fixture(scope="module")
def dipole_grid():
    return ConeGrid(ConeGeometry(build_dipole_sphere(3, 0.5, 4)), 30.0, 128)


def random_field(grid, rng, band=4.0):
    """Spectrally band-limited random field."""
    rho = grid.frequency_nodes
    c = (rng.standard_normal(rho.shape) + 1j * rng.standard_normal(rho.shape)) * np.exp(-(rho / band) ** 2)
    return grid.from_scaled(c)


# ---------------------------------------------------------------------------
# fields and Parseval


def test_parseval_matches_direct_quadrature(flat_grid):
    # u = (1 + x_3) e^{-|x|^2/2}, smooth at the apex: ||u||^2 = pi^{3/2} (1 + 1/2)
    u = project_modes(flat_grid, lambda r, y: np.exp(-r ** 2 / 2) * (1 + r * y[..., 2]))
    assert abs(u.norm() ** 2 - 1.5 * np.pi ** 1.5) < 1e-10


def test_single_mode_projection(flat_grid):
    model = flat_grid.model
    j = 3
    coeffs = np.zeros((model.num_modes, flat_grid.N))
    coeffs[j] = np.exp(-(flat_grid.radial_nodes[j] - 5) ** 2)

    def u(r, y):
        return np.exp(-(r - 5) ** 2) * model.evaluate(y[0])[:, j][None, :]

    p = project_modes(flat_grid, u)
    assert np.max(np.abs(p.coeffs - coeffs)) < 1e-12


def test_zero_field(flat_grid):
    z = flat_grid.zeros()
    assert z.norm() == 0
    assert propagate(z, 3.0).norm() == 0
    assert z.to_radial().norm() == 0


@settings(max_examples=20)
@given(st.integers(0, 2 ** 32 - 1))
def test_representation_round_trip(seed):
    grid = ConeGrid(ConeGeometry(build_flat_sphere(3, 1)), 20.0, 64)
    u = random_field(grid, np.random.default_rng(seed))
    back = u.to_radial().to_spectral()
    assert np.max(np.abs(back.coeffs - u.coeffs)) < 1e-10 * np.max(np.abs(u.coeffs))
    assert abs(u.to_radial().norm() - u.norm()) < 1e-8 * u.norm()


def test_reconstruct_matches_data(flat_grid):
    f = lambda r, y: np.exp(-(r - 6) ** 2 / 2) * (1 + 0.5 * y[..., 0])
    u = project_modes(flat_grid, f)
    r = np.array([3.0, 5.5, 6.2, 9.0])
    y = np.array([[1.0, 0, 0], [0, 1.0, 0], [0.6, 0, 0.8], [0, 0, 1.0]])
    assert np.allclose(reconstruct_field(u, r, y), f(r, y), atol=1e-10)


def test_mixed_grids_rejected(flat_grid):
    other = ConeGrid(ConeGeometry(build_flat_sphere(3, 2)), 30.0, 128)
    with pytest.raises(DomainError):
        flat_grid.zeros() + other.zeros()


def test_bad_representation(flat_grid):
    with pytest.raises(DomainError):
        ConeField(flat_grid, "neither", np.zeros((flat_grid.num_modes, flat_grid.N)))
    with pytest.raises(DomainError):
        ConeField(flat_grid, SPECTRAL, np.zeros((1, 3)))


# ---------------------------------------------------------------------------
# multipliers


def test_identity_multiplier(dipole_grid):
    u = random_field(dipole_grid, np.random.default_rng(1))
    v = apply_spectral_multiplier(u, lambda rho: np.ones_like(rho))
    assert (v - u).norm() < 1e-14 * u.norm()


def test_energy_squares(dipole_grid):
    u = random_field(dipole_grid, np.random.default_rng(2))
    sq = SpectralMultiplier.of_energy(lambda e: e)
    twice = apply_spectral_multiplier(apply_spectral_multiplier(u, sq), sq)
    once = apply_spectral_multiplier(u, SpectralMultiplier.of_energy(lambda e: e * e))
    assert (twice - once).norm() < 1e-10 * once.norm()


@settings(max_examples=15)
@given(st.floats(0.01, 3), st.floats(-2, 2))
def test_multiplier_functoriality(a, b):
    grid = ConeGrid(ConeGeometry(build_dipole_sphere(3, 0.5, 4)), 20.0, 64)
    u = random_field(grid, np.random.default_rng(0))
    F = SpectralMultiplier.of_energy(lambda e: np.exp(-a * e))
    G = SpectralMultiplier.of_energy(lambda e: np.cos(b * e) + 2)
    lhs = apply_spectral_multiplier(apply_spectral_multiplier(u, G), F)
    rhs = apply_spectral_multiplier(u, F * G)
    assert (lhs - rhs).norm() <= 1e-10 * max(rhs.norm(), 1e-300)


def test_heat_flow_decreases_h1(dipole_grid):
    u = random_field(dipole_grid, np.random.default_rng(3))
    prev = sobolev_norm(u, 1)
    for t in (0.01, 0.1, 1.0):
        v = apply_spectral_multiplier(u, SpectralMultiplier.of_energy(lambda e: np.exp(-t * e)))
        cur = sobolev_norm(v, 1)
        assert cur < prev
        prev = cur


def test_nonfinite_multiplier_rejected(flat_grid):
    with pytest.raises(DomainError):
        apply_spectral_multiplier(flat_grid.zeros(), lambda rho: np.full_like(rho, np.inf))


# ---------------------------------------------------------------------------
# propagator


def test_propagate_identity_at_zero(dipole_grid):
    u = random_field(dipole_grid, np.random.default_rng(4))
    assert (propagate(u, 0.0) - u).norm() == 0


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_unitarity(dipole_grid, t):
    rng = np.random.default_rng(5)
    for _ in range(20):
        u = random_field(dipole_grid, rng)
        assert abs(propagate(u, t).norm() - u.norm()) < 1e-10 * u.norm()


@settings(max_examples=20)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_group_law(s, t):
    grid = ConeGrid(ConeGeometry(build_dipole_sphere(3, 0.5, 4)), 20.0, 64)
    u = random_field(grid, np.random.default_rng(6))
    lhs = propagate(propagate(u, s), t)
    assert (lhs - propagate(u, s + t)).norm() < 1e-10 * u.norm()


def test_conjugate_time_inverts(dipole_grid):
    u = random_field(dipole_grid, np.random.default_rng(7))
    back = propagate(propagate(u, 2.5), 2.5, conjugate_time=True)
    assert (back - u).norm() < 1e-12 * u.norm()


@pytest.fixture(scope="module")
def gaussian_setup():
    grid = ConeGrid(ConeGeometry(build_flat_sphere(3, 0)), 60.0, 300)
    a0 = np.sqrt(4 * np.pi) * np.exp(-grid.radial_nodes ** 2 / 2)
    return grid, ConeField(grid, RADIAL, a0)


@pytest.mark.parametrize("t,tol", [(0.5, 1e-6), (2.0, 1e-5)])
@pytest.mark.parametrize("conj", [False, True])
def test_free_gaussian_closed_form(gaussian_setup, t, tol, conj):
    grid, u0 = gaussian_setup
    sign = -1 if conj else 1
    exact = np.sqrt(4 * np.pi) * free_gaussian(grid.radial_nodes, t, sign)
    ref = ConeField(grid, RADIAL, exact)
    err = (propagate(u0, t, conjugate_time=conj) - ref).norm() / u0.norm()
    assert err < tol


def test_small_time_taylor_sign(gaussian_setup):
    # u(t) ~ u0 + i t L u0 with L = -Laplacian: the sign fixes e^{+itL}
    grid, u0 = gaussian_setup
    t = 1e-4
    Lu = apply_spectral_multiplier(u0, SpectralMultiplier.of_energy(lambda e: e))
    lin = u0 + Lu * (1j * t)
    assert (propagate(u0, t) - lin).norm() < 1e-6 * u0.norm()
    assert (propagate(u0, -t) - lin).norm() > 1e-5 * u0.norm()


def test_gaussian_solves_pde():
    # i u_t + L u = 0 with L = -(d^2/dr^2 + (2/r) d/dr) on the closed form
    r = np.linspace(0.5, 4, 8)
    t, h = 0.7, 1e-4
    u = lambda r, t: free_gaussian(r, t)
    ut = (u(r, t + h) - u(r, t - h)) / (2 * h)
    urr = (u(r + h, t) - 2 * u(r, t) + u(r - h, t)) / h ** 2
    ur = (u(r + h, t) - u(r - h, t)) / (2 * h)
    residual = 1j * ut - (urr + 2 * ur / r)
    assert np.max(np.abs(residual)) < 1e-5


# ---------------------------------------------------------------------------
# kernels


def test_sphere_dimensions_match_labels():
    for m in (2, 3, 4, 5):
        labels = _sphere_labels(m, 6)
        for ell in range(7):
            assert sum(1 for lab in labels if lab[0] == ell) == _sphere_dim(m, ell)


@pytest.fixture(scope="module")
def flat20():
    return ConeGeometry(build_flat_sphere(3, 20))


def test_spectral_measure_diagonal_value(flat20):
    z = (1.0, [0, 0, 1])
    lemma = spectral_measure_kernel(flat20, 1.0, z, z)
    assert abs(lemma.value - 1 / (4 * np.pi)) < 1e-12
    assert lemma.tail_bound < 1e-12
    # pre = 1 gives the free density of states lam^2 / (2 pi^2)
    prop = spectral_measure_kernel(flat20, 1.0, z, z, normalization="propagator")
    assert abs(prop.value - 1 / (2 * np.pi ** 2)) < 1e-12
    assert abs(lemma.value / prop.value - np.pi / 2) < 1e-12


def test_spectral_measure_antipodal_small_r(flat20):
    # the l = 0 term survives: the limit is lam^2/(4 pi), not zero
    vals = []
    for r in (1e-1, 1e-2, 1e-3):
        k = spectral_measure_kernel(flat20, 1.0, (r, [0, 0, 1]), (r, [0, 0, -1]))
        vals.append(k.value * 4 * np.pi)
    assert abs(vals[-1] - 1) < 1e-6
    assert np.all(np.diff(np.abs(np.array(vals) - 1)) < 0)


@pytest.mark.xfail(strict=True, reason="the l = 0 mode keeps the antipodal kernel at lam^2/(4 pi)")
def test_spectral_measure_antipodal_vanishes(flat20):
    k = spectral_measure_kernel(flat20, 1.0, (1e-3, [0, 0, 1]), (1e-3, [0, 0, -1]))
    assert abs(k.value) < 1e-3


def test_spectral_measure_tail_strict():
    geo = ConeGeometry(build_flat_sphere(3, 2))
    with pytest.raises(TailNotConverged):
        spectral_measure_kernel(geo, 1.0, (8.0, [0, 0, 1]), (8.0, [0, 0, 1]))
    k = spectral_measure_kernel(geo, 1.0, (8.0, [0, 0, 1]), (8.0, [0, 0, 1]), strict=False)
    assert k.tail_bound > 0


@pytest.mark.slow
def test_propagator_consistency():
    grid = ConeGrid(ConeGeometry(build_flat_sphere(3, 4)), 20.0, 200)
    z = (3.1, np.array([0.1, 0.0, 1.0]))
    for t in (0.0, 0.05, 0.2):
        prop = propagator_consistency(grid, t, z, 3.0, [0, 0, 1], 0.3)
        assert prop.relative_error < 0.02
        lemma = propagator_consistency(grid, t, z, 3.0, [0, 0, 1], 0.3, normalization="lemma")
        assert abs(lemma.ratio - np.pi / 2) < 0.02 * np.pi / 2


def _yukawa(z, zp):
    (r, y), (rp, yp) = z, zp
    x = r * np.asarray(y) / np.linalg.norm(y) - rp * np.asarray(yp) / np.linalg.norm(yp)
    d = np.linalg.norm(x)
    return np.exp(-d) / (4 * np.pi * d)


@pytest.mark.parametrize("L", [20, 30, 40])
def test_resolvent_matches_yukawa(L):
    geo = ConeGeometry(build_flat_sphere(3, L))
    g = 0.8
    z, zp = (1.0, [0, 0, 1.0]), (1.3, [np.sin(g), 0, np.cos(g)])
    k = resolvent_kernel(geo, 1.0, z, zp, strict=False)
    exact = _yukawa(z, zp)
    err = abs(k.value - exact)
    assert err <= k.tail_bound
    if L == 40:
        assert err < 1e-4 * exact


def test_resolvent_strict_tail():
    geo = ConeGeometry(build_flat_sphere(3, 20))
    with pytest.raises(TailNotConverged):
        resolvent_kernel(geo, 1.0, (1.0, [0, 0, 1]), (1.3, [0.6, 0, 0.8]))


def test_resolvent_scaling_and_symmetry():
    geo = ConeGeometry(build_dipole_sphere(3, 0.5, 8))
    z, zp = (1.0, [0, 0, 1.0]), (2.5, [0.3, 0.4, 0.5])
    lam = 1.7
    base = resolvent_kernel(geo, lam, z, zp, strict=False).value
    scaled = resolvent_kernel(geo, 1.0, (lam * z[0], z[1]), (lam * zp[0], zp[1]), strict=False).value
    assert abs(base - lam ** (geo.n - 2) * scaled) < 1e-8 * abs(base)
    swap = resolvent_kernel(geo, lam, zp, z, strict=False).value
    assert abs(base - swap) < 1e-14 * abs(base)


def test_resolvent_diagonal_rejected(flat20):
    with pytest.raises(DomainError):
        resolvent_kernel(flat20, 1.0, (1.0, [0, 0, 1]), (1.0, [0, 0, 2]))
    with pytest.raises(DomainError):
        resolvent_kernel(flat20, -1.0, (1.0, [0, 0, 1]), (2.0, [0, 0, 1]))


def test_yukawa_mode_sum_independent():
    # addition theorem route: Legendre sum of I K products
    geo = ConeGeometry(build_flat_sphere(3, 30))
    g = 0.8
    r, rp = 1.0, 1.3
    ells = np.arange(31)
    nu = ells + 0.5
    terms = (2 * ells + 1) / (4 * np.pi) * special.eval_legendre(ells, np.cos(g))
    terms *= special.iv(nu, r) * special.kv(nu, rp) / np.sqrt(r * rp)
    k = resolvent_kernel(geo, 1.0, (r, [0, 0, 1.0]), (rp, [np.sin(g), 0, np.cos(g)]), strict=False)
    assert abs(k.value - terms.sum()) < 1e-13 * abs(k.value)


# ---------------------------------------------------------------------------
# Duhamel


def _duhamel_data(grid):
    return project_modes(grid, lambda r, y: np.exp(-(r - 8) ** 2 / 2)
                         * (1 + 0.5 * y[..., 2] + 0.3 * y[..., 0]))


def test_duhamel_without_potential():
    grid = ConeGrid(ConeGeometry(build_dipole_sphere(3, 0.0, 4)), 30.0, 256)
    u0 = _duhamel_data(grid)
    assert duhamel_residual(grid, u0, 0.5, 8) < 1e-10 * u0.norm()


@pytest.mark.slow
def test_duhamel_midpoint_order():
    grid = ConeGrid(ConeGeometry(build_dipole_sphere(3, 0.25, 4)), 30.0, 256)
    u0 = _duhamel_data(grid)
    res = {m: duhamel_residual(grid, u0, 0.5, m) / u0.norm() for m in (4, 8, 16)}
    assert 3.0 < res[4] / res[8] < 5.0
    assert 3.0 < res[8] / res[16] < 5.0
    assert duhamel_residual(grid, u0, 0.5, 256) < 1e-4 * u0.norm()


def test_duhamel_sign_is_fixed():
    grid = ConeGrid(ConeGeometry(build_dipole_sphere(3, 0.25, 4)), 30.0, 256)
    u0 = _duhamel_data(grid)
    good = duhamel_residual(grid, u0, 0.05, 8)
    bad = duhamel_residual(grid, u0, 0.05, 8, sign=-1)
    assert good < 1e-2 * bad
