#  ***************************************************************************
#  This file is part of DampedINLS:
#  A numerical laboratory for the damped inhomogeneous NLS equation with an
#  inverse-square potential
#  Copyright (C) <2026>  <DampedINLS contributors>
#
#  This program is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  This program is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with this program.  If not, see <http://www.gnu.org/licenses/>.
#
#  ***************************************************************************

"""Strang splitting for the gauged equation.

With v = e^(A(t)) u the damped equation becomes

    i v_t = K_lambda v + mu e^(-(p-1) A(t)) |x|^-b |v|^(p-1) v,

which is split into the exact linear flow U_lambda and the exact pointwise
phase rotation of the nonlinear part. The coefficient e^(-(p-1) A) is frozen
at the midpoint of each step.
"""

import logging
from math import ceil
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .base import AbstractRepr
from .damping import AbstractDamping, gauge_factor
from .errors import BlowUpDetected
from .params import ModelParams
from .radial import (ReducedField, SpectralOperator, action_i,
                     boundary_mass_fraction, energy, mass, potential_term,
                     gradient_proxy, potential_weights, quadratic_form,
                     resolution_proxy)

logger = logging.getLogger(__name__)

# |v|^(p-1) above this is treated as numerical blow-up.
OVERFLOW_LIMIT = 1e100
BLOWUP_FACTOR = 1e6
RESOLUTION_LIMIT = 0.5
GRADIENT_LIMIT = 1.0
BOUNDARY_FRACTION = 1e-6


class SimulationState(AbstractRepr):
    """Gauge variable v at time t, with the profile and model it evolves under."""

    __slots__ = ('_v', '_profile', '_params')

    def __init__(self, v: ReducedField, profile: AbstractDamping,
                 params: ModelParams):
        """Store the state."""
        if not isinstance(v, ReducedField):
            raise TypeError('v must be a ReducedField')
        if not isinstance(profile, AbstractDamping):
            raise TypeError('profile must be a damping profile')
        if not isinstance(params, ModelParams):
            raise TypeError('params must be ModelParams')
        if v.dim != params.N:
            raise ValueError(f'field dimension {v.dim} differs from N={params.N}')
        self._v = v
        self._profile = profile
        self._params = params

    @property
    def t(self) -> float:
        """Get the time."""
        return self._v.t

    @property
    def v(self) -> ReducedField:
        """Get the gauge variable."""
        return self._v

    @property
    def profile(self) -> AbstractDamping:
        """Get the damping profile."""
        return self._profile

    @property
    def params(self) -> ModelParams:
        """Get the model constants."""
        return self._params

    def advanced(self, v: ReducedField) -> 'SimulationState':
        """Get a state with the same profile and model and a new v."""
        return SimulationState(v, self._profile, self._params)


class ObservableRecord(NamedTuple):
    """Observables of u = e^(-A(t)) v at one sample time."""

    t: float
    mass: float
    quadform: float
    potential: float
    energy: float
    action_i: float
    A_t: float
    boundary_flag: bool


class BlowUp(NamedTuple):
    """A fired blow-up monitor; time is a lower bound proxy for T*."""

    time: float
    reason: str


class Trajectory(AbstractRepr):
    """Sampled observables and stored v-snapshots of one run."""

    COLUMNS = ('t', 'mass', 'quadform', 'potential', 'energy', 'action_i', 'A_t')

    __slots__ = ('records', 'snapshots', 'blowup', 'params', 'profile', 'dt',
                 'T')

    def __init__(self, params: ModelParams, profile: AbstractDamping,
                 dt: float, T: float):
        """Create an empty trajectory."""
        self.records: List[ObservableRecord] = []
        self.snapshots: List[ReducedField] = []
        self.blowup: Optional[BlowUp] = None
        self.params = params
        self.profile = profile
        self.dt = dt
        self.T = T

    def append(self, record: ObservableRecord) -> None:
        """Append a sample; times must increase strictly."""
        if self.records and record.t <= self.records[-1].t:
            raise ValueError('sample times must increase strictly')
        self.records.append(record)

    @property
    def times(self) -> np.ndarray:
        """Get the sample times."""
        return self.column('t')

    def column(self, name: str) -> np.ndarray:
        """Get one observable over all samples."""
        if name not in ObservableRecord._fields:
            raise ValueError(f'unknown observable: {name}')
        return np.array([getattr(record, name) for record in self.records])

    def table(self) -> np.ndarray:
        """Get the CSV table t, mass, quadform, potential, energy, action_i, A_t."""
        return np.column_stack([self.column(name) for name in self.COLUMNS])

    @property
    def completed(self) -> bool:
        """Whether the run reached T without the monitor firing."""
        return self.blowup is None


class _Splitting:
    """Precomputed pieces of the Strang step on one operator."""

    def __init__(self, op: SpectralOperator, params: ModelParams,
                 profile: AbstractDamping):
        self.op = op
        self.params = params
        self.profile = profile
        self.weights = potential_weights(op.grid, params.N, params.b, params.p)
        self._phases = {}

    def linear(self, w: np.ndarray, dt: float) -> np.ndarray:
        phases = self._phases.get(dt)
        if phases is None:
            phases = self._phases[dt] = np.exp(-1j * self.op.eigvals * dt)
        return self.op.from_modes(phases * self.op.to_modes(w))

    def kick(self, w: np.ndarray, t: float, dt: float,
             coefficient: Optional[float] = None) -> np.ndarray:
        p = self.params.p
        if coefficient is None:
            coefficient = gauge_factor(self.profile, t + dt / 2, p - 1)
        modulus = np.abs(w)
        power = modulus ** (p - 1)
        magnitude = float(np.max(power * self.weights)) if w.size else 0.0
        if not np.isfinite(magnitude) or magnitude > OVERFLOW_LIMIT:
            raise BlowUpDetected(t, magnitude)
        angle = self.params.mu * dt * coefficient * self.weights * power
        return w * np.exp(-1j * angle)


def strang_step(state: SimulationState, op: SpectralOperator, dt: float,
                nonlinear: bool = True) -> SimulationState:
    """Advance v by one Strang step of size dt.

    Half linear step, midpoint phase rotation, half linear step; both
    substeps are isometries, so ||v|| is conserved exactly.

    :param nonlinear: Skip the phase rotation if False (pure U_lambda(dt)).
    :raises BlowUpDetected: |v|^(p-1) overflowed.
    """
    if dt <= 0:
        raise ValueError('dt must be > 0')
    op.check_field(state.v)
    splitting = _Splitting(op, state.params, state.profile)
    w = splitting.linear(state.v.w, dt / 2)
    if nonlinear:
        w = splitting.kick(w, state.t, dt)
    w = splitting.linear(w, dt / 2)
    return state.advanced(state.v.replace(w=w, t=state.t + dt))


def recover_u(state: SimulationState) -> ReducedField:
    """Get u = e^(-A(t)) v."""
    return state.v.scaled(gauge_factor(state.profile, state.t, 1))


def blowup_monitor(state: SimulationState, op: SpectralOperator,
                   initial_quadform: float, factor: float = BLOWUP_FACTOR,
                   resolution_limit: float = RESOLUTION_LIMIT,
                   gradient_limit: float = GRADIENT_LIMIT) -> Optional[BlowUp]:
    """Check the blow-up proxies on u(t).

    Fires on non-finite samples and when <K_lambda u, u> exceeds factor
    times its initial value. Two grid proxies fire as well: the resolution
    proxy (about h times the local wavenumber of w) above resolution_limit
    and h max |grad u| above gradient_limit.
    """
    u = recover_u(state)
    if not np.all(np.isfinite(u.w)):
        return BlowUp(state.t, 'non-finite field')
    quadform = quadratic_form(op, u)
    if initial_quadform > 0 and quadform > factor * initial_quadform:
        growth = quadform / initial_quadform
        return BlowUp(state.t, f'quadratic form grew by {growth:.3e}')
    proxy = resolution_proxy(u)
    if proxy > resolution_limit:
        return BlowUp(state.t, f'under-resolved: resolution proxy {proxy:.3f}')
    gradient = gradient_proxy(u)
    if gradient > gradient_limit:
        return BlowUp(state.t, f'under-resolved: h max|grad u| = {gradient:.3f}')
    return None


def observe(state: SimulationState, op: SpectralOperator,
            boundary_fraction: float = BOUNDARY_FRACTION) -> ObservableRecord:
    """Measure the observables of u(t) for the trajectory."""
    params = state.params
    u = recover_u(state)
    return ObservableRecord(
        t=state.t,
        mass=mass(u),
        quadform=quadratic_form(op, u),
        potential=potential_term(u, params.b, params.p),
        energy=energy(op, u, params),
        action_i=action_i(op, u, params),
        A_t=float(state.profile.integral(state.t)),
        boundary_flag=boundary_mass_fraction(u) > boundary_fraction,
    )


def step_count(T: float, dt: float) -> Tuple[int, float]:
    """Get the number of steps covering [0, T] and the step that fits exactly."""
    if T <= 0:
        raise ValueError('T must be > 0')
    if not 0 < dt <= T:
        raise ValueError('dt must satisfy 0 < dt <= T')
    steps = int(ceil(T / dt - 1e-9))
    return steps, T / steps


def evolve(u0: ReducedField, T: float, dt: float, profile: AbstractDamping,
           params: ModelParams, op: SpectralOperator, sample_every: int = 1,
           snapshot_every: Optional[float] = None, nonlinear: bool = True,
           blowup_factor: float = BLOWUP_FACTOR,
           resolution_limit: float = RESOLUTION_LIMIT,
           gradient_limit: float = GRADIENT_LIMIT,
           boundary_fraction: float = BOUNDARY_FRACTION) -> Trajectory:
    """Evolve u0 up to time T and record the trajectory.

    Observables are sampled every sample_every steps and v is stored every
    snapshot_every time units (always at t = 0 and at the end). Consecutive
    half linear steps between two recorded steps are fused into one. A fired
    monitor ends the run early and is stored as trajectory.blowup.
    """
    if not isinstance(sample_every, int) or sample_every < 1:
        raise ValueError('sample_every must be an integer >= 1')
    op.check_field(u0)
    steps, dt = step_count(T, dt)
    snapshot_stride = (max(1, int(round(snapshot_every / dt)))
                       if snapshot_every else None)
    if getattr(profile, 'exploratory', False):
        logger.warning('damping vanishes on an interval; run is exploratory')
    logger.info('evolving %s under %s: T=%g, dt=%g, steps=%d', params, profile,
                T, dt, steps)

    trajectory = Trajectory(params, profile, dt, T)
    splitting = _Splitting(op, params, profile)
    state = SimulationState(u0.replace(t=0.0), profile, params)
    trajectory.append(observe(state, op, boundary_fraction))
    initial_quadform = trajectory.records[0].quadform
    if snapshot_stride:
        trajectory.snapshots.append(state.v)

    w = state.v.w
    pending = False
    for step in range(steps):
        t = step * dt
        w = splitting.linear(w, dt if pending else dt / 2)
        if nonlinear:
            try:
                w = splitting.kick(w, t, dt)
            except BlowUpDetected as error:
                logger.info('run stopped: %s', error)
                trajectory.blowup = BlowUp(error.time, str(error))
                return trajectory
        number = step + 1
        sample = number % sample_every == 0
        snapshot = bool(snapshot_stride) and number % snapshot_stride == 0
        if not (sample or snapshot or number == steps):
            pending = True
            continue
        w = splitting.linear(w, dt / 2)
        pending = False
        state = state.advanced(state.v.replace(w=w, t=number * dt))
        if snapshot or (snapshot_stride and number == steps):
            trajectory.snapshots.append(state.v)
        if sample or number == steps:
            trajectory.append(observe(state, op, boundary_fraction))
            fired = blowup_monitor(state, op, initial_quadform, blowup_factor,
                                   resolution_limit, gradient_limit)
            if fired:
                logger.info('blow-up monitor fired at t=%g: %s', fired.time,
                            fired.reason)
                trajectory.blowup = fired
                return trajectory
    flagged = sum(record.boundary_flag for record in trajectory.records)
    if flagged:
        logger.warning('%d of %d samples have mass at the outer wall', flagged,
                       len(trajectory.records))
    logger.info('run completed at t=%g', T)
    return trajectory


def damped_strang_step(u: ReducedField, op: SpectralOperator, dt: float,
                       profile: AbstractDamping,
                       params: ModelParams) -> ReducedField:
    """Advance u itself (no gauge) by one step of size dt.

    Half phase rotation with unit coefficient, full linear step with the
    damping factor e^(-(A(t+dt) - A(t))), half phase rotation. The
    rotations act on the damped amplitude, so this ordering differs from
    strang_step by O(dt^2) over a run.

    :raises BlowUpDetected: |u|^(p-1) overflowed.
    """
    if dt <= 0:
        raise ValueError('dt must be > 0')
    op.check_field(u)
    splitting = _Splitting(op, params, profile)
    t = u.t
    damping = float(profile.integral(t + dt) - profile.integral(t))
    w = splitting.kick(u.w, t, dt / 2, coefficient=1.0)
    w = splitting.linear(w, dt) * np.exp(-damping)
    w = splitting.kick(w, t + dt / 2, dt / 2, coefficient=1.0)
    return u.replace(w=w, t=t + dt)


def evolve_damped(u0: ReducedField, T: float, dt: float,
                  profile: AbstractDamping, params: ModelParams,
                  op: SpectralOperator) -> ReducedField:
    """Evolve u0 to time T with damped_strang_step and return u(T)."""
    steps, dt = step_count(T, dt)
    u = u0.replace(t=0.0)
    for _ in range(steps):
        u = damped_strang_step(u, op, dt, profile, params)
    return u
