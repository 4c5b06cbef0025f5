"""Mixed space-time norms of free evolutions and the Strichartz quotient."""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import DomainError, NonAdmissiblePair
from .ensembles import random_ensemble
from .report import QuotientReport, stable

TIME_INTERVALS = 256
ADMISSIBLE_TOL = 1e-12


def is_admissible(q, r, n):
    """2 <= q, r <= inf, 2/q + n/r = n/2 and (q, r, n) != (2, inf, 2)."""
    if not (q >= 2 and r >= 2):
        return False
    if q == 2 and np.isinf(r) and n == 2:
        return False
    return abs(2 / q + n / r - n / 2) <= ADMISSIBLE_TOL


def check_admissible(q, r, n):
    if not is_admissible(q, r, n):
        raise NonAdmissiblePair(f"(q, r) = ({q}, {r}) is not admissible in dimension {n}: "
                                f"2/q + n/r = {2 / q + n / r:.6g}, need {n / 2:g}")


def _degree_for(model, p):
    """Y quadrature degree exact for |u|^p when p is an even integer."""
    L = model.L_max
    if np.isinf(p) or p <= 2:
        return 2 * L
    return max(2 * L, int(np.ceil(p)) * L)


def time_grid(T, intervals):
    return np.linspace(0.0, T, intervals + 1)


def space_norms(ensemble, times, exponents, chunk=16, workers=1):
    """||e^{itL} u_s||_{L^p(X)} for each exponent, member s and time t.

    Returns {p: array (size, len(times))}. p = 2 is computed spectrally;
    other exponents on the uniform radial grid times a Y quadrature.
    """
    grid = ensemble.grid
    c0 = ensemble.scaled()
    rho2 = grid.frequency_nodes ** 2
    out = {}
    finite = [p for p in exponents if p != 2]
    for p in exponents:
        if p == 2:
            out[p] = np.repeat(np.linalg.norm(c0, axis=(1, 2))[:, None], len(times), axis=1)
    if not finite:
        return out
    degree = max(_degree_for(grid.model, p) for p in finite)
    ph = grid.physical(degree)
    W = ph.radial_weights[:, None] * ph.weights[None, :]
    for p in finite:
        out[p] = np.empty((ensemble.size, len(times)))

    def member(s):
        # each member writes only its own rows, so any worker count gives
        # bit-identical results
        for m0 in range(0, len(times), chunk):
            t = times[m0:m0 + chunk]
            c = c0[s][None] * np.exp(1j * t[:, None, None] * rho2[None])
            prof = np.empty(c.shape, complex)
            for pl, idx in enumerate(grid.plan_modes):
                prof[:, idx] = c[:, idx] @ ph.synthesis[pl].T
            vals = np.abs(prof.transpose(0, 2, 1) @ ph.Phi.T)
            for p in finite:
                if np.isinf(p):
                    out[p][s, m0:m0 + chunk] = vals.max(axis=(1, 2))
                else:
                    out[p][s, m0:m0 + chunk] = np.einsum("mrq,rq->m", vals ** p, W) ** (1 / p)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(member, range(ensemble.size)))
    else:
        for s in range(ensemble.size):
            member(s)
    return out


def time_norm(values, times, q):
    """L^q over the sampled interval by the composite trapezoid rule."""
    if np.isinf(q):
        return values.max(axis=-1)
    return np.trapezoid(values ** q, times, axis=-1) ** (1 / q)


def strichartz_scan(grid, pairs, T, ensemble=None, seed=0, intervals=TIME_INTERVALS,
                    workers=1):
    """Strichartz quotients for several admissible pairs from one sweep.

    The base horizon T uses `intervals` trapezoid intervals; the doubled
    horizon 2T keeps the same step and uses twice as many.
    """
    n = grid.n
    for q, r in pairs:
        check_admissible(q, r, n)
    if not T > 0:
        raise DomainError("horizon T must be positive")
    if ensemble is None:
        ensemble = random_ensemble(grid, seed=seed)
    times = time_grid(2 * T, 2 * intervals)
    norms = space_norms(ensemble, times, sorted({r for _, r in pairs}), workers=workers)
    data = np.linalg.norm(ensemble.scaled(), axis=(1, 2))
    reports = []
    for q, r in pairs:
        f = norms[r]
        base = time_norm(f[:, :intervals + 1], times[:intervals + 1], q) / data
        doubled = time_norm(f, times, q) / data
        coarse = time_norm(f[:, :intervals + 1:2], times[:intervals + 1:2], q) / data
        richardson = float(np.max(np.abs(base - coarse) / 3 / base))
        sup, sup2 = float(base.max()), float(doubled.max())
        reports.append(QuotientReport(
            "strichartz", {"q": q, "r": r, "T": T, "n": n}, ensemble.size, sup, sup2,
            stable(sup, sup2), tuple(map(float, base)),
            {"richardson": richardson, "dt": T / intervals}))
    return reports


def strichartz_quotient(grid, q, r, T, ensemble=None, seed=0, intervals=TIME_INTERVALS,
                        workers=1):
    """sup over the ensemble of ||u||_{L^q_t L^r_z([0,T] x X)} / ||u_0||_2."""
    return strichartz_scan(grid, [(q, r)], T, ensemble, seed, intervals, workers)[0]
