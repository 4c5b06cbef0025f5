"""Cubic NLS  i u_t + L_V u + gamma |u|^2 u = 0  on a cone of dimension 3.

Strang splitting: half a nonlinear phase rotation u <- u e^{i gamma |u|^2 dt/2}
on the physical grid, a full linear step e^{i dt L_V} on the Hankel grid,
then another half rotation. With L_V >= 0 the energy

    E = int (|sqrt(L_V) u|^2 / 2 + gamma |u|^4 / 4) dv

is positive for gamma = +1 (defocusing). In the more common form
i v_t = -Delta v + g |v|^2 v this is v(t) = conj(u(t)) with g = gamma.
"""
from dataclasses import dataclass

import numpy as np

from .calculus import propagate, sobolev_norm
from .errors import BlowupSuspected, DomainError, StepTooLarge
from .fields import ConeField

PHASE_LIMIT = np.pi / 4
BLOWUP_FACTOR = 10.0


@dataclass(frozen=True)
class ConservedPair:
    mass: float
    energy: float


@dataclass(frozen=True)
class NlsState:
    field: ConeField
    t: float
    gamma: float
    dt: float

    @property
    def conserved(self):
        return ConservedPair(mass(self), energy(self))


def admissible_pair_q0r0(nu0, offset=1e-3):
    """(q0, r0) = (5, 30/11) for nu0 > 2/5, else ((2/nu0)+, (6/(3 - 2 nu0))-)."""
    if not nu0 > 0:
        raise DomainError("nu0 must be positive")
    if nu0 > 0.4:
        return 5.0, 30.0 / 11.0
    return 2.0 / nu0 + offset, 6.0 / (3.0 - 2.0 * nu0) - offset


def _nls_grid(field):
    grid = field.grid
    if grid.n != 3:
        raise DomainError("the cubic NLS solver is set up for n = 3")
    if not grid.model.supports_evaluation:
        raise DomainError("the nonlinearity needs pointwise eigenfunctions")
    return grid.physical(4 * grid.model.L_max)


def mass(state):
    f = state.field if isinstance(state, NlsState) else state
    return float(np.sum(np.abs(f.scaled_spectral()) ** 2))


def quartic_integral(field):
    ph = _nls_grid(field)
    u = ph.values(field)
    return float(np.sum(ph.radial_weights[:, None] * ph.weights[None, :] * np.abs(u) ** 4))


def energy(state, gamma=None):
    if isinstance(state, NlsState):
        field, gamma = state.field, state.gamma if gamma is None else gamma
    else:
        field = state
    kinetic = 0.5 * sobolev_norm(field, 1.0) ** 2
    if gamma == 0:
        return kinetic
    return kinetic + 0.25 * gamma * quartic_integral(field)


def h1_norm(field):
    return sobolev_norm(field, 1.0, homogeneous=False)


class _Stepper:
    """Strang steps on scaled spectral coefficients."""

    def __init__(self, grid, gamma, dt):
        self.grid = grid
        self.gamma = gamma
        self.dt = dt
        self.ph = _nls_grid(grid.zeros())
        self.phase = np.exp(1j * dt * grid.frequency_nodes ** 2)
        self.orth = [self.ph.orthogonal(p) for p in range(len(grid.plans))]

    def nonlinear(self, c, tau):
        if self.gamma == 0:
            return c
        ph = self.ph
        g = np.empty(c.shape, complex)
        for p, idx in enumerate(self.grid.plan_modes):
            g[idx] = c[idx] @ self.orth[p].T
        vals = (g / ph.sqrt_w).T @ ph.Phi.T
        vals = vals * np.exp(1j * self.gamma * tau * np.abs(vals) ** 2)
        g = ((vals * ph.weights) @ ph.Phi).T * ph.sqrt_w
        out = np.empty(c.shape, complex)
        for p, idx in enumerate(self.grid.plan_modes):
            out[idx] = g[idx] @ self.orth[p]
        return out

    def step(self, c):
        c = self.nonlinear(c, 0.5 * self.dt)
        c = c * self.phase
        return self.nonlinear(c, 0.5 * self.dt)


def nls_evolve(u0, T, dt, gamma=1.0, snapshots=None):
    """Evolve to time T (negative T runs backward) and return NlsState snapshots.

    `snapshots` lists the times to record (default: 0 and T); each is
    rounded to the nearest step.
    """
    grid = u0.grid
    if not dt > 0:
        raise DomainError("dt must be positive")
    if dt * grid.rho_max ** 2 > PHASE_LIMIT:
        raise StepTooLarge(f"dt * rho_max^2 = {dt * grid.rho_max ** 2:.3g} exceeds pi/4; "
                           f"use dt <= {PHASE_LIMIT / grid.rho_max ** 2:.3g}")
    if not np.isfinite(h1_norm(u0)):
        raise DomainError("initial data is not in H^1")
    steps = int(round(abs(T) / dt))
    sign = 1.0 if T >= 0 else -1.0
    times = [0.0, T] if snapshots is None else list(snapshots)
    marks = sorted({int(round(abs(s) / dt)) for s in times if 0 <= abs(s) <= abs(T) + dt / 2})
    stepper = _Stepper(grid, gamma, sign * dt)
    c = u0.scaled_spectral()
    h1_start = h1_norm(u0)
    out = []
    m = 0
    for k in range(steps + 1):
        if m < len(marks) and marks[m] == k:
            out.append(NlsState(grid.from_scaled(c), sign * k * dt, gamma, dt))
            m += 1
        if k == steps:
            break
        c = stepper.step(c)
        if k % 16 == 15 or k == steps - 1:
            h1 = float(np.sqrt(np.sum(np.abs(c) ** 2 * (1 + grid.frequency_nodes ** 2))))
            if not np.isfinite(h1) or h1 > BLOWUP_FACTOR * h1_start:
                raise BlowupSuspected(f"H^1 norm grew from {h1_start:.3g} to {h1:.3g} "
                                      f"by t = {sign * (k + 1) * dt:.4g}")
    return out


@dataclass(frozen=True)
class ScatteringRow:
    t: float
    v_h1: float
    increment: float


def scattering_profile(trajectory):
    """v(t) = e^{-itL_V} u(t) along a trajectory, with H^1 Cauchy increments."""
    rows = []
    prev = None
    for state in trajectory:
        v = propagate(state.field, -state.t)
        inc = np.nan if prev is None else h1_norm(v - prev)
        rows.append(ScatteringRow(float(state.t), h1_norm(v), float(inc)))
        prev = v
    return rows
