"""Real-order Bessel functions, their zeros, and regime-wise envelopes.

Values of J, Y, I, K come from the AMOS/Cephes routines in scipy.special.
This module adds domain checking, Wronskian-based error estimates, a
bracketing zero finder for J_nu and the three-regime envelope check.
"""
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _envelope_constants as _env
from .errors import DomainError

NU_MAX = 200.0
X_MAX = 1.0e6
_EPS = np.finfo(float).eps
TINY_ORDER = 1e-300


def _check(nu, x, strict):
    nu_a = np.asarray(nu, dtype=float)
    x_a = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(nu_a)) or np.any(nu_a < 0) or np.any(nu_a > NU_MAX):
        raise DomainError(f"order must lie in [0, {NU_MAX:g}]")
    if np.any(~np.isfinite(x_a)) or np.any(x_a > X_MAX):
        raise DomainError(f"argument must be finite and at most {X_MAX:g}")
    # scipy's Y and K return 0 or nan at subnormal orders; such orders are 0
    nu_a = np.where(nu_a < TINY_ORDER, 0.0, nu_a)
    if strict and np.any(x_a <= 0):
        raise DomainError("argument must be strictly positive")
    if np.any(x_a < 0):
        raise DomainError("argument must be non-negative")
    return nu_a, x_a


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def bessel_j(nu, x):
    """J_nu(x) for 0 <= nu <= 200 and 0 <= x <= 1e6."""
    nu_a, x_a = _check(nu, x, strict=False)
    return _out(special.jv(nu_a, x_a))


def bessel_y(nu, x):
    """Y_nu(x) for 0 <= nu <= 200 and 0 < x <= 1e6."""
    nu_a, x_a = _check(nu, x, strict=True)
    return _out(special.yv(nu_a, x_a))


def bessel_i(nu, x):
    """I_nu(x); overflows to inf beyond x of roughly 700."""
    nu_a, x_a = _check(nu, x, strict=False)
    return _out(special.iv(nu_a, x_a))


def bessel_k(nu, x):
    """K_nu(x) for x > 0; underflows to 0 beyond x of roughly 700."""
    nu_a, x_a = _check(nu, x, strict=True)
    return _out(special.kv(nu_a, x_a))


def bessel_ie(nu, x):
    """Exponentially scaled e^{-x} I_nu(x)."""
    nu_a, x_a = _check(nu, x, strict=False)
    return _out(special.ive(nu_a, x_a))


def bessel_ke(nu, x):
    """Exponentially scaled e^{x} K_nu(x)."""
    nu_a, x_a = _check(nu, x, strict=True)
    return _out(special.kve(nu_a, x_a))


def bessel_jp(nu, x):
    """J_nu'(x) from the recurrence J' = (J_{nu-1} - J_{nu+1})/2."""
    nu_a, x_a = _check(nu, x, strict=False)
    return _out(0.5 * (special.jv(nu_a - 1, x_a) - special.jv(nu_a + 1, x_a)))


def bessel_yp(nu, x):
    nu_a, x_a = _check(nu, x, strict=True)
    return _out(0.5 * (special.yv(nu_a - 1, x_a) - special.yv(nu_a + 1, x_a)))


def bessel_ip(nu, x):
    nu_a, x_a = _check(nu, x, strict=False)
    return _out(0.5 * (special.iv(nu_a - 1, x_a) + special.iv(nu_a + 1, x_a)))


def bessel_kp(nu, x):
    nu_a, x_a = _check(nu, x, strict=True)
    return _out(-0.5 * (special.kv(nu_a - 1, x_a) + special.kv(nu_a + 1, x_a)))


def wronskian_defect_jy(nu, x):
    """Relative defect of J Y' - J' Y = 2/(pi x)."""
    nu_a, x_a = _check(nu, x, strict=True)
    j, y = special.jv(nu_a, x_a), special.yv(nu_a, x_a)
    jp = 0.5 * (special.jv(nu_a - 1, x_a) - special.jv(nu_a + 1, x_a))
    yp = 0.5 * (special.yv(nu_a - 1, x_a) - special.yv(nu_a + 1, x_a))
    w = j * yp - jp * y
    return _out(np.abs(w * np.pi * x_a / 2 - 1))


def wronskian_defect_ik(nu, x):
    """Relative defect of I K' - I' K = -1/x, using scaled functions."""
    nu_a, x_a = _check(nu, x, strict=True)
    i, k = special.ive(nu_a, x_a), special.kve(nu_a, x_a)
    ip = 0.5 * (special.ive(nu_a - 1, x_a) + special.ive(nu_a + 1, x_a))
    kp = -0.5 * (special.kve(nu_a - 1, x_a) + special.kve(nu_a + 1, x_a))
    w = i * kp - ip * k
    return _out(np.abs(w * x_a + 1))


@dataclass(frozen=True)
class BesselEval:
    kind: str
    order: float
    argument: float
    value: float
    relative_error_estimate: float


_KINDS = {
    "J": (bessel_j, bessel_jp, wronskian_defect_jy),
    "Y": (bessel_y, bessel_yp, wronskian_defect_jy),
    "I": (bessel_i, bessel_ip, wronskian_defect_ik),
    "K": (bessel_k, bessel_kp, wronskian_defect_ik),
}


def bessel_eval(kind, nu, x):
    """Evaluate one Bessel function with an error estimate.

    The estimate adds the Wronskian defect of the (J, Y) or (I, K) pair to
    the argument rounding error scaled by the condition number |x f'/f|, so
    it grows near zeros where relative accuracy is genuinely lost.
    """
    try:
        f, fp, defect = _KINDS[kind]
    except KeyError:
        raise DomainError(f"unknown Bessel kind {kind!r}") from None
    if x <= 0:
        raise DomainError("argument must be strictly positive")
    value = f(nu, x)
    slope = fp(nu, x)
    if value == 0 or not np.isfinite(value):
        cond = np.inf
    else:
        cond = max(1.0, abs(x * slope / value))
    # the defect measures the evaluator itself; rounding of x is amplified by cond
    err = defect(nu, x) + 4 * _EPS * cond
    return BesselEval(kind, float(nu), float(x), float(value), float(err))


@dataclass(frozen=True)
class ZeroTable:
    order: float
    zeros: np.ndarray

    def __len__(self):
        return len(self.zeros)

    def __getitem__(self, k):
        return self.zeros[k]


def _refine_zeros(nu, lo, hi):
    flo = special.jv(nu, lo)
    for _ in range(8):
        mid = 0.5 * (lo + hi)
        fm = special.jv(nu, mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    z = 0.5 * (lo + hi)
    for _ in range(5):
        f = special.jv(nu, z)
        fp = 0.5 * (special.jv(nu - 1, z) - special.jv(nu + 1, z))
        step = np.where(fp != 0, f / np.where(fp != 0, fp, 1.0), 0.0)
        z = np.clip(z - step, lo, hi)
    return z


def bessel_j_zeros(nu, count):
    """First `count` positive zeros of J_nu, ascending.

    Zeros of J_nu are separated by more than 2.3 for every nu >= 0, so a
    scan with step 1/2 brackets each one exactly once. Brackets are then
    narrowed by bisection and finished with safeguarded Newton steps.
    """
    count = int(count)
    if count < 1 or count > 100000:
        raise DomainError("count must lie in [1, 1e5]")
    if not 0 <= nu <= NU_MAX:
        raise DomainError(f"order must lie in [0, {NU_MAX:g}]")
    start = max(float(nu), 0.1)
    upper = (count + nu / 2 + 2) * np.pi + 2.0
    while True:
        xs = np.arange(start, upper + 0.5, 0.5)
        f = special.jv(nu, xs)
        idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)[0]
        idx = idx[f[idx] != 0] if np.any(f[idx] == 0) else idx
        if len(idx) >= count:
            break
        upper *= 1.5
    idx = idx[:count]
    z = _refine_zeros(nu, xs[idx], xs[idx + 1])
    z.setflags(write=False)
    return ZeroTable(float(nu), z)


@dataclass(frozen=True)
class RegimeBound:
    regime: str
    envelope: float
    value: float

    @property
    def satisfied(self):
        return abs(self.value) <= self.envelope


def regime_of(nu, x):
    if x <= nu / 2:
        return "small"
    if x < 2 * nu:
        return "transition"
    return "oscillatory"


def regime_envelope(nu, x):
    """Envelope of |J_nu(x)| for the regime containing x."""
    regime = regime_of(nu, x)
    if regime == "small":
        env = _env.SMALL_C * np.exp(-_env.SMALL_c * (nu + x))
    elif regime == "transition":
        env = _env.TRANSITION_C * nu ** (-1 / 3) * (nu ** (-1 / 3) * abs(x - nu) + 1) ** (-0.25)
    else:
        env = _env.OSCILLATORY_C * x ** -0.5
    return regime, float(env)


def bessel_regime_bounds(nu, x):
    """Classify (nu, x) into the small / transition / oscillatory regime.

    Returns the regime tag, the calibrated envelope and J_nu(x) itself.
    """
    if nu < 2:
        raise DomainError("regime bounds need nu >= 2")
    if x <= 0:
        raise DomainError("argument must be strictly positive")
    regime, env = regime_envelope(nu, x)
    return RegimeBound(regime, env, bessel_j(nu, x))
