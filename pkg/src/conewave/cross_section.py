"""Angular spectrum of Delta_h + V0 on the cross-section of a cone.

Three families are supported: round spheres S^{n-1} (V0 = 0), the
dipole potential a*cos(theta) on S^2, and user supplied spectra that live
in mode space only. Each mode carries its order
nu = sqrt((n-2)^2/4 + lambda), which is what the radial Hankel transforms
are built on.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError, PositivityViolation, UnsupportedEvaluation

DEGENERACY_TOL = 1e-9
MAX_MODES = 20000
MAX_NODES = 2_000_000


# ---------------------------------------------------------------------------
# real hyperspherical harmonics on S^m, built one dimension at a time


def _sphere_labels(m, L):
    """Labels of real harmonics of degree <= L on S^m, as nested tuples.

    A label is (degree, inner_label); on S^1 it is (k, 'c') or (k, 's').
    """
    if m == 1:
        out = [(0, "c")]
        for k in range(1, L + 1):
            out += [(k, "c"), (k, "s")]
        return out
    inner = _sphere_labels(m - 1, L)
    out = []
    for ell in range(L + 1):
        for lab in inner:
            if lab[0] <= ell:
                out.append((ell, lab))
    return out


def _gegenbauer_lognorm(j, alpha):
    # log of int_{-1}^{1} C_j^alpha(t)^2 (1 - t^2)^(alpha - 1/2) dt
    return (np.log(np.pi) + (1 - 2 * alpha) * np.log(2) + special.gammaln(j + 2 * alpha)
            - special.gammaln(j + 1) - np.log(j + alpha) - 2 * special.gammaln(alpha))


def _sphere_harmonics(m, L, X):
    """Values of all real harmonics of degree <= L on S^m at unit vectors X.

    Returns an array of shape (len(X), count) ordered like _sphere_labels.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if m == 1:
        phi = np.arctan2(X[:, 1], X[:, 0])
        cols = [np.full(len(X), 1 / np.sqrt(2 * np.pi))]
        for k in range(1, L + 1):
            cols += [np.cos(k * phi) / np.sqrt(np.pi), np.sin(k * phi) / np.sqrt(np.pi)]
        return np.stack(cols, axis=1)
    t = np.clip(X[:, -1], -1.0, 1.0)
    s = np.sqrt(np.maximum(0.0, 1 - t * t))
    omega = np.zeros((len(X), m))
    omega[:, 0] = 1.0
    ok = s > 1e-300
    omega[ok] = X[ok, :-1] / s[ok, None]
    inner_labels = _sphere_labels(m - 1, L)
    inner = _sphere_harmonics(m - 1, L, omega)
    cols = []
    for ell in range(L + 1):
        for idx, lab in enumerate(inner_labels):
            k = lab[0]
            if k > ell:
                continue
            alpha = k + (m - 1) / 2
            j = ell - k
            if alpha == 0:
                # only on S^1 itself, never reached for m >= 2
                raise AssertionError
            lognorm = _gegenbauer_lognorm(j, alpha)
            a = special.eval_gegenbauer(j, alpha, t) * np.exp(-0.5 * lognorm)
            cols.append(a * s ** k * inner[:, idx])
    return np.stack(cols, axis=1)


def _azimuth_nodes(count):
    phi = 2 * np.pi * np.arange(count) / count
    return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(count, 2 * np.pi / count)


def sphere_quadrature(m, degree):
    """Product rule on S^m exact for polynomials of total degree <= degree.

    Gauss-Gegenbauer in the last coordinate (Gauss-Legendre on S^2) times
    the rule on S^{m-1}; uniform azimuth on S^1.
    """
    degree = int(degree)
    if m == 1:
        return _azimuth_nodes(degree + 1)
    nt = degree // 2 + 1
    alpha = (m - 1) / 2
    if m == 2:
        t, wt = special.roots_legendre(nt)
    else:
        t, wt = special.roots_gegenbauer(nt, alpha)
    inner_x, inner_w = sphere_quadrature(m - 1, degree)
    s = np.sqrt(1 - t * t)
    pts = np.concatenate([
        np.concatenate([s[i] * inner_x, np.full((len(inner_x), 1), t[i])], axis=1)
        for i in range(nt)])
    w = np.concatenate([wt[i] * inner_w for i in range(nt)])
    return pts, w


def _node_count(m, degree):
    count = degree + 1
    for _ in range(m - 1):
        count *= degree // 2 + 1
    return count


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeGroup:
    nu: float
    lam: float
    degeneracy: int
    indices: tuple


@dataclass(eq=False)
class CrossSectionModel:
    """Angular spectrum with optional eigenfunction evaluation.

    `nu` and `lam` are per mode and sorted by nu. For sphere based models
    the eigenfunctions are `coef` combinations of the real harmonics with
    `labels`; `coef` is None for the round sphere (identity).
    """
    n: int
    kind: str
    lam: np.ndarray
    nu: np.ndarray
    L_max: int = 0
    labels: list = None
    coef: np.ndarray = None
    params: dict = field(default_factory=dict)
    _quad: dict = field(default_factory=dict, repr=False)

    @property
    def num_modes(self):
        return len(self.nu)

    @property
    def nu0(self):
        return float(self.nu[0])

    @property
    def supports_evaluation(self):
        return self.kind != "custom"

    @property
    def groups(self):
        return _group_modes(self.nu, self.lam)

    @property
    def modes(self):
        """(nu, lambda, degeneracy) per distinct eigenvalue."""
        return [(g.nu, g.lam, g.degeneracy) for g in self.groups]

    @property
    def harmonic_degree(self):
        """Per mode, the highest harmonic degree it contains."""
        if self.kind == "custom":
            raise UnsupportedEvaluation("custom spectra carry no harmonic structure")
        deg = np.array([lab[0] for lab in self.labels])
        if self.coef is None:
            return deg
        return np.array([deg[np.abs(c) > 1e-14].max() for c in self.coef.T])

    def _require_eval(self):
        if not self.supports_evaluation:
            raise UnsupportedEvaluation("this cross-section model has no pointwise eigenfunctions")

    def evaluate(self, points):
        """Matrix of eigenfunction values, shape (len(points), num_modes)."""
        self._require_eval()
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.n:
            raise DomainError(f"points on S^{self.n - 1} need {self.n} coordinates")
        vals = _sphere_harmonics(self.n - 1, self.L_max, pts)
        return vals if self.coef is None else vals @ self.coef

    def quadrature(self, degree=None):
        """(nodes, weights) exact for polynomials of the given degree.

        The default degree 2*L_max integrates every product of two retained
        eigenfunctions exactly.
        """
        self._require_eval()
        degree = 2 * self.L_max if degree is None else int(degree)
        if degree not in self._quad:
            if _node_count(self.n - 1, degree) > MAX_NODES:
                raise DomainError("quadrature grid too large for this dimension and degree")
            self._quad[degree] = sphere_quadrature(self.n - 1, degree)
        return self._quad[degree]

    def distance(self, y, yp):
        """Geodesic distance on the unit sphere."""
        self._require_eval()
        y, yp = np.asarray(y, float), np.asarray(yp, float)
        # chord form: arccos of the dot product loses half the digits near 0
        chord = np.linalg.norm(y - yp, axis=-1)
        return 2 * np.arcsin(np.clip(chord / 2, 0.0, 1.0))


def _group_modes(nu, lam):
    groups = []
    start = 0
    for i in range(1, len(lam) + 1):
        if i == len(lam) or abs(lam[i] - lam[i - 1]) >= DEGENERACY_TOL:
            idx = tuple(range(start, i))
            groups.append(ModeGroup(float(np.mean(nu[start:i])), float(np.mean(lam[start:i])),
                                    len(idx), idx))
            start = i
    return groups


def mode_orders(n, lam):
    """nu = sqrt((n-2)^2/4 + lambda), rejecting non-positive arguments."""
    lam = np.asarray(lam, dtype=float)
    shifted = lam + (n - 2) ** 2 / 4
    if np.any(shifted <= 0):
        bad = float(lam[np.argmin(shifted)])
        raise PositivityViolation(
            f"lambda = {bad:g} gives lambda + (n-2)^2/4 = {bad + (n - 2) ** 2 / 4:g} <= 0")
    return np.sqrt(shifted)


def _check_size(n, L_max):
    if not 2 <= n <= 6:
        raise DomainError("cone dimension must lie in [2, 6]")
    if not 0 <= L_max <= 64:
        raise DomainError("L_max must lie in [0, 64]")
    count = len(_sphere_labels(n - 1, L_max)) if n > 2 else 2 * L_max + 1
    if count > MAX_MODES:
        raise DomainError(f"{count} harmonics exceeds the supported {MAX_MODES}")


@lru_cache(maxsize=None)
def build_flat_sphere(n, L_max):
    """Round sphere S^{n-1} with V0 = 0, harmonics of degree <= L_max."""
    _check_size(n, L_max)
    labels = _sphere_labels(n - 1, L_max)
    deg = np.array([lab[0] for lab in labels], dtype=float)
    lam = deg * (deg + n - 2)
    nu = mode_orders(n, lam)
    return CrossSectionModel(n=n, kind="flat", lam=lam, nu=nu, L_max=L_max, labels=labels)


def _dipole_matrix_blocks(a, L_max):
    """Blocks of Delta + a*cos(theta) on S^2, one per azimuthal label."""
    labels = _sphere_labels(2, L_max)
    pts, w = sphere_quadrature(2, 2 * L_max + 1)
    Y = _sphere_harmonics(2, L_max, pts)
    cos_mat = Y.T @ (Y * (w * pts[:, 2])[:, None])
    deg = np.array([lab[0] for lab in labels], dtype=float)
    inner = [lab[1] for lab in labels]
    blocks = {}
    for i, key in enumerate(inner):
        blocks.setdefault(key, []).append(i)
    out = []
    for key, idx in blocks.items():
        idx = np.array(idx)
        H = np.diag(deg[idx] * (deg[idx] + 1)) + a * cos_mat[np.ix_(idx, idx)]
        out.append((idx, 0.5 * (H + H.T)))
    return labels, out


def _dipole_spectrum(a, L_max):
    labels, blocks = _dipole_matrix_blocks(a, L_max)
    K = len(labels)
    lam = np.empty(K)
    coef = np.zeros((K, K))
    col = 0
    for idx, H in blocks:
        vals, vecs = np.linalg.eigh(H)
        for j in range(len(vals)):
            v = vecs[:, j]
            if v[np.argmax(np.abs(v))] < 0:
                v = -v
            lam[col] = vals[j]
            coef[idx, col] = v
            col += 1
    order = np.lexsort((np.arange(K), np.round(lam, 12)))
    return labels, lam[order], coef[:, order]


@lru_cache(maxsize=None)
def build_dipole_sphere(n, a, L_max):
    """Delta_{S^2} + a*cos(theta) diagonalized in the real harmonic basis.

    The potential only couples degrees l and l+1 at fixed azimuthal label,
    so each azimuthal block is diagonalized on its own.
    """
    if n != 3:
        raise DomainError("the dipole cross-section is defined for n = 3 only")
    _check_size(3, L_max)
    if L_max < 2:
        raise DomainError("dipole model needs L_max >= 2 for its convergence gate")
    a = float(a)
    labels, lam, coef = _dipole_spectrum(a, L_max)
    nu = mode_orders(3, lam)
    if a != 0.0:
        lam_prev = _dipole_spectrum(a, L_max - 2)[1]
        nu_prev = np.sqrt(lam_prev[0] + 0.25) if lam_prev[0] + 0.25 > 0 else np.nan
        if not abs(nu[0] - nu_prev) <= 1e-6:
            raise ConvergenceError(
                f"nu0 moved by {abs(nu[0] - nu_prev):.3g} between L_max-2 and L_max")
    return CrossSectionModel(n=3, kind="dipole", lam=lam, nu=nu, L_max=L_max, labels=labels,
                             coef=coef, params={"a": a})


def build_custom_spectrum(n, spectrum):
    """Mode-space model from (lambda, degeneracy) pairs; no point evaluation."""
    if not 2 <= int(n) <= 6:
        raise DomainError("cone dimension must lie in [2, 6]")
    lam = []
    for value, mult in spectrum:
        if int(mult) != mult or mult < 1:
            raise DomainError("degeneracies must be positive integers")
        lam += [float(value)] * int(mult)
    if not lam:
        raise DomainError("empty spectrum")
    lam = np.sort(np.array(lam))
    nu = mode_orders(int(n), lam)
    return CrossSectionModel(n=int(n), kind="custom", lam=lam, nu=nu)


def read_spectrum_file(path):
    """Parse 'lambda degeneracy' lines; '#' starts a comment."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].replace(",", " ").split()
            if not line:
                continue
            lam = float(line[0])
            mult = int(line[1]) if len(line) > 1 else 1
            out.append((lam, mult))
    return out


def eigenfunction_eval(model, index, y):
    """phi_index(y) for unit vector(s) y."""
    model._require_eval()
    if not 0 <= index < model.num_modes:
        raise DomainError("mode index out of range")
    vals = model.evaluate(np.atleast_2d(y))[:, index]
    return float(vals[0]) if np.ndim(y) == 1 else vals


def hormander_ratio(model, refine=4):
    """max_j ||phi_j||_inf / nu_j^{(n-1)/2} on a grid refined `refine` times."""
    model._require_eval()
    pts, _ = sphere_quadrature(model.n - 1, refine * max(2 * model.L_max, 1))
    sup = np.abs(model.evaluate(pts)).max(axis=0)
    return float(np.max(sup / model.nu ** ((model.n - 1) / 2)))


@dataclass(frozen=True)
class ConeGeometry:
    """Metric cone over a cross-section; points are (r, unit vector)."""
    cross_section: CrossSectionModel

    @property
    def n(self):
        return self.cross_section.n

    def distance(self, z, zp):
        r, y = z
        rp, yp = zp
        dy = self.cross_section.distance(y, yp)
        if dy <= np.pi:
            return float(np.sqrt((r - rp) ** 2 + 4 * r * rp * np.sin(dy / 2) ** 2))
        return float(r + rp)
