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

"""Verdicts on trajectories: conservation laws, decay rates and scattering.

Every report is a frozen dataclass with an ``as_dict`` for the JSON
artifacts.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from . import calc
from .damping import AbstractDamping, Constant, Zero, slope_extremes
from .evolution import Trajectory, evolve, evolve_damped
from .groundstate import GroundState, threshold_norms
from .params import ModelParams, Regime, classify_regime, intercritical_triple
from .radial import (RadialGrid, ReducedField, SpectralOperator, build_operator,
                     gaussian, h1_lambda_norm, hardy_ratio, lr_norm, mass,
                     quadratic_form, random_smooth_field)

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10
SCATTER_TOL = 1e-4
GRONWALL_SLACK = 0.05
HARDY_SLACK = 0.05
# s[i+1] <= s[i] (1 + MONOTONE_RTOL) + MONOTONE_ATOL ||u0|| counts as
# nonincreasing.
MONOTONE_RTOL = 1e-10
MONOTONE_ATOL = 1e-12
OBSERVABLES = ('sqrtK_norm_sq', 'h1_norm', 'mass')


class RunVerdict(Enum):
    """Qualitative outcome of one run."""

    SCATTERS = 'scatters'
    BOUNDED = 'bounded'
    BLOWUP = 'blow-up'


@dataclass(frozen=True)
class OrderEstimate:
    """Convergence order from a log-log fit over refinement levels."""

    order: float
    stderr: float
    levels: int

    def within(self, expected: float, tolerance: float) -> bool:
        """Whether |order - expected| <= tolerance."""
        return abs(self.order - expected) <= tolerance


@dataclass(frozen=True)
class IdentityReport:
    """Maximum residuals of the mass law, energy law and both Hamiltonians.

    Residuals other than the mass law are divided by the largest
    <K_lambda u, u> (energy law) or e^(2A) <K_lambda u, u> (Hamiltonians) seen
    along the run.
    """

    mass_law: float
    energy_law: float
    hamiltonian: float
    v_hamiltonian: float
    samples: int
    orders: Dict[str, OrderEstimate] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        """Get the report as plain data."""
        return asdict(self)


@dataclass(frozen=True)
class DecayFit:
    """Log-linear fit log y = intercept - rate t over a time window."""

    observable: str
    rate: float
    intercept: float
    window: Tuple[float, float]
    r_squared: float
    stderr: float
    samples: int
    predicted: Optional[float] = None

    @property
    def margin(self) -> Optional[float]:
        """Get rate/predicted - 1, if a prediction is attached."""
        if not self.predicted:
            return None
        return self.rate / self.predicted - 1

    def as_dict(self) -> Dict[str, Any]:
        """Get the fit as plain data."""
        return dict(asdict(self), margin=self.margin)


@dataclass(frozen=True)
class DispersiveFit:
    """Log-log slope of ||U_lambda(t) phi||_{L^r} against the predicted one."""

    r_exponent: float
    slope: float
    predicted_slope: float
    window: Tuple[float, float]
    r_squared: float
    stderr: float

    @property
    def relative_error(self) -> float:
        """Get |slope/predicted - 1|, or |slope| when 0 is predicted."""
        if self.predicted_slope == 0:
            return abs(self.slope)
        return abs(self.slope / self.predicted_slope - 1)

    def as_dict(self) -> Dict[str, Any]:
        """Get the fit as plain data."""
        return dict(asdict(self), relative_error=self.relative_error)


@dataclass(frozen=True)
class GronwallReport:
    """Pointwise check of <K u(t), u(t)> <= E(u0)/(1-rho) e^(-rate t) (1+slack).

    passed is None when the hypotheses do not hold; that is not a failure.
    """

    rho: float
    condition_holds: bool
    below_threshold: bool
    rate: Optional[float]
    max_ratio: Optional[float]
    passed: Optional[bool]
    message: str

    def as_dict(self) -> Dict[str, Any]:
        """Get the report as plain data."""
        return asdict(self)


@dataclass(frozen=True)
class ScatteringReport:
    """Cauchy tail s(t_i) = ||U(-t_i) v(t_i) - U(-t_last) v(t_last)||_{H^1_lambda}."""

    times: Tuple[float, ...]
    tail: Tuple[float, ...]
    monotone: bool
    tolerance: float
    scatters: bool

    def as_dict(self) -> Dict[str, Any]:
        """Get the report as plain data."""
        return asdict(self)


@dataclass(frozen=True)
class ScanRow:
    """One point of a threshold or damping scan."""

    value: float
    norm_u0: float
    verdict: RunVerdict
    rate: Optional[float]
    end_time: float

    def as_dict(self) -> Dict[str, Any]:
        """Get the row as plain data."""
        return asdict(self)


@dataclass(frozen=True)
class AStarReport:
    """Smallest scattering constant damping in a grid, with the heuristics."""

    empirical: Optional[float]
    rows: Tuple[ScanRow, ...]
    h1_norm: float
    heuristic: Optional[float]
    a_double_star: Optional[float]
    bootstrap_closes: Optional[bool]

    def as_dict(self) -> Dict[str, Any]:
        """Get the report as plain data."""
        return asdict(self)


@dataclass(frozen=True)
class HardyReport:
    """Hardy ratios of random fields and of the near-optimizer family."""

    dim: int
    lambda_n: float
    min_ratio: float
    family: Tuple[float, ...]
    passed: bool

    def as_dict(self) -> Dict[str, Any]:
        """Get the report as plain data."""
        return asdict(self)


@dataclass(frozen=True)
class NormEquivalence:
    """Empirical c1, c2 bounding ||f||^2_{H^1_lambda} / ||f||^2_{H^1}."""

    lam: float
    c1: float
    c2: float

    def as_dict(self) -> Dict[str, Any]:
        """Get the constants as plain data."""
        return asdict(self)


def _series(traj: Trajectory, name: str) -> np.ndarray:
    return traj.column(name)


def identity_suite(traj: Trajectory) -> IdentityReport:
    """Measure the four conservation laws along a trajectory.

    (i)   e^(2A) M(u) / M(u0) - 1 (exact for the splitting);
    (ii)  finite-difference dE/dt against the trapezoid mean of -2 a I;
    (iii) drift of H(u) = e^(2A) E(u) + mu c int a e^(2A) P(u) ds, the
          integral accumulated by the trapezoid rule, c = 2(p-1)/(p+1);
    (iv)  finite-difference dH(v)/dt, H(v) = K(v) + mu 2/(p+1) e^(-(p-1)A) P(v),
          against the trapezoid mean of -mu c a e^(2A) P(u).

    :raises ValueError: Fewer than MIN_SAMPLES samples.
    """
    if len(traj.records) < MIN_SAMPLES:
        raise ValueError(f'identity_suite needs at least {MIN_SAMPLES} samples, '
                         f'got {len(traj.records)}')
    params = traj.params
    p, mu = params.p, params.mu
    t = _series(traj, 't')
    gauge = np.exp(2 * _series(traj, 'A_t'))
    rate = traj.profile.rate(t)
    masses = _series(traj, 'mass')
    quadform = _series(traj, 'quadform')
    potential = _series(traj, 'potential')
    energy = _series(traj, 'energy')
    action = _series(traj, 'action_i')
    dt = np.diff(t)
    coefficient = 2 * (p - 1) / (p + 1)

    mass_law = (float(np.max(np.abs(gauge * masses / masses[0] - 1)))
                if masses[0] > 0 else 0.0)

    scale = max(float(quadform.max()), np.finfo(float).tiny)
    source = -2 * rate * action
    energy_law = np.abs(np.diff(energy) / dt - (source[1:] + source[:-1]) / 2)

    v_scale = max(float((gauge * quadform).max()), np.finfo(float).tiny)
    leak = mu * coefficient * rate * gauge * potential
    accumulated = np.concatenate(([0.0], np.cumsum(dt * (leak[1:] + leak[:-1]) / 2)))
    hamiltonian = gauge * energy + accumulated

    # K(v) = e^(2A) K(u) and P(v) = e^((p+1)A) P(u)
    v_energy = gauge * quadform + mu * 2 / (p + 1) * gauge * potential
    v_law = np.abs(np.diff(v_energy) / dt + (leak[1:] + leak[:-1]) / 2)

    report = IdentityReport(
        mass_law=mass_law,
        energy_law=float(energy_law.max()) / scale,
        hamiltonian=float(np.max(np.abs(hamiltonian - hamiltonian[0]))) / v_scale,
        v_hamiltonian=float(v_law.max()) / v_scale,
        samples=len(t),
    )
    logger.debug('identity residuals: %s', report)
    return report


def convergence_order(steps: Sequence[float],
                      errors: Sequence[float]) -> OrderEstimate:
    """Fit errors ~ C steps^order in log-log scale (at least 3 levels).

    :raises ValueError: Too few levels or nonpositive values.
    """
    steps = np.asarray(steps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if steps.shape != errors.shape or steps.size < 3:
        raise ValueError('convergence_order needs at least 3 matching levels')
    if np.any(steps <= 0) or np.any(errors <= 0):
        raise ValueError('steps and errors must be positive')
    fit = linregress(np.log(steps), np.log(errors))
    return OrderEstimate(float(fit.slope), float(fit.stderr), int(steps.size))


def identity_study(u0: ReducedField, T: float, steps: Sequence[float],
                   profile: AbstractDamping, params: ModelParams,
                   op: SpectralOperator) -> IdentityReport:
    """Run identity_suite at several dt and attach the convergence orders.

    The returned residuals are those of the finest dt; orders are given for
    the energy law and both Hamiltonians.
    """
    steps = sorted(steps, reverse=True)
    reports = []
    for dt in steps:
        traj = evolve(u0, T, dt, profile, params, op)
        if not traj.completed:
            raise ValueError(f'run with dt={dt} stopped early: {traj.blowup}')
        reports.append(identity_suite(traj))
    orders = {}
    for name in ('energy_law', 'hamiltonian', 'v_hamiltonian'):
        errors = [getattr(report, name) for report in reports]
        try:
            orders[name] = convergence_order(steps, errors)
        except ValueError:
            logger.warning('no convergence order for %s (residuals %s)', name, errors)
    finest = reports[-1]
    return IdentityReport(finest.mass_law, finest.energy_law, finest.hamiltonian,
                          finest.v_hamiltonian, finest.samples, orders)


def _observable(traj: Trajectory, observable: str) -> np.ndarray:
    if observable == 'sqrtK_norm_sq':
        return _series(traj, 'quadform')
    if observable == 'h1_norm':
        return np.sqrt(_series(traj, 'mass') + _series(traj, 'quadform'))
    if observable == 'mass':
        return _series(traj, 'mass')
    raise ValueError(f'observable must be one of {OBSERVABLES}')


def decay_fit(traj: Trajectory, observable: str, window: Tuple[float, float],
              predicted: Optional[float] = None) -> DecayFit:
    """Fit log(observable) against t on the window, skipping flagged samples.

    :raises ValueError: Too few samples or a nonpositive observable.
    """
    t1, t2 = window
    if not t1 < t2:
        raise ValueError('window must satisfy t1 < t2')
    t = _series(traj, 't')
    values = _observable(traj, observable)
    flagged = _series(traj, 'boundary_flag').astype(bool)
    chosen = (t >= t1) & (t <= t2) & ~flagged
    if chosen.sum() < 3:
        raise ValueError(f'window {window} holds fewer than 3 usable samples')
    if np.any(values[chosen] <= 0):
        raise ValueError(f'{observable} is not positive on the window')
    fit = linregress(t[chosen], np.log(values[chosen]))
    return DecayFit(observable, float(-fit.slope), float(fit.intercept),
                    (float(t1), float(t2)), float(fit.rvalue ** 2),
                    float(fit.stderr), int(chosen.sum()), predicted)


def gronwall_bound_check(traj: Trajectory, gs: GroundState,
                         slack: float = GRONWALL_SLACK) -> GronwallReport:
    """Check the mass-critical decay bound pointwise along the trajectory.

    rho = (||u0||/||Q||)^(p-1) must satisfy (p-1) rho/(1-rho) < 2, which is
    the same as ||u0|| below threshold_norms(gs). The decay rate uses
    a_lower of the trajectory's profile over its horizon.

    :raises ValueError: The params are not mass-critical or differ from gs.
    """
    params = traj.params
    if classify_regime(params) is not Regime.MASS_CRITICAL:
        raise ValueError('gronwall_bound_check needs mass-critical params')
    if params != gs.params:
        raise ValueError('trajectory and ground state have different params')
    p = params.p
    first = traj.records[0]
    norm_u0 = float(np.sqrt(first.mass))
    rho = (norm_u0 / gs.norm_q) ** (p - 1)
    below = norm_u0 < threshold_norms(gs)
    holds = rho < 1 and (p - 1) * rho / (1 - rho) < 2
    if not holds:
        message = (f'hypothesis not met: rho={rho:.6g} violates '
                   f'(p-1) rho/(1-rho) < 2')
        logger.warning(message)
        return GronwallReport(rho, False, below, None, None, None, message)
    a_lower, _ = slope_extremes(traj.profile, max(traj.T, traj.dt))
    rate = calc.mass_critical_decay_rate(p, rho, a_lower)
    t = _series(traj, 't')
    bound = first.energy / (1 - rho) * np.exp(-rate * t)
    ratios = _series(traj, 'quadform') / bound
    max_ratio = float(ratios.max())
    passed = max_ratio <= 1 + slack
    message = (f'bound holds (max ratio {max_ratio:.4f})' if passed
               else f'bound violated at t={t[int(ratios.argmax())]:.6g}')
    logger.info('Gronwall check: rho=%.6g, rate=%.6g, %s', rho, rate, message)
    return GronwallReport(rho, True, below, rate, max_ratio, passed, message)


def _is_monotone(tail: np.ndarray, slack: float) -> bool:
    return bool(np.all(tail[1:] <= tail[:-1] * (1 + MONOTONE_RTOL) + slack))


def scattering_detector(snapshots: Sequence[ReducedField], op: SpectralOperator,
                        u0_h1: Optional[float] = None,
                        tolerance: float = SCATTER_TOL,
                        window: float = 1.0) -> ScatteringReport:
    """Measure the Cauchy tail of U_lambda(-t) v(t) in H^1_lambda.

    The run scatters when the tail is nonincreasing up to round-off and its
    second to last value is below tolerance ||u0||_{H^1_lambda}.

    :param u0_h1: Defaults to the H^1_lambda norm of the first snapshot.
    :param window: Trailing share of the tail checked for monotonicity; the
        whole tail by default.
    :raises ValueError: Fewer than 3 snapshots, times not increasing or
                        window outside (0, 1].
    """
    if len(snapshots) < 3:
        raise ValueError('scattering_detector needs at least 3 snapshots')
    if not 0 < window <= 1:
        raise ValueError('window must satisfy 0 < window <= 1')
    times = np.array([snapshot.t for snapshot in snapshots])
    if np.any(np.diff(times) <= 0):
        raise ValueError('snapshot times must increase strictly')
    for snapshot in snapshots:
        op.check_field(snapshot)
    if u0_h1 is None:
        u0_h1 = h1_lambda_norm(op, snapshots[0])
    modes = np.stack([np.exp(1j * op.eigvals * snapshot.t) * op.to_modes(snapshot.w)
                      for snapshot in snapshots])
    weights = op.weight * (1 + op.eigvals)
    tail = np.sqrt(np.sum(weights * np.abs(modes - modes[-1]) ** 2, axis=1))
    start = len(tail) - max(2, int(np.ceil(window * len(tail))))
    monotone = _is_monotone(tail[start:], MONOTONE_ATOL * u0_h1)
    scatters = monotone and tail[-2] < tolerance * u0_h1
    return ScatteringReport(tuple(times.tolist()), tuple(tail.tolist()), monotone,
                            float(tolerance * u0_h1), bool(scatters))


def run_verdict(traj: Trajectory, op: SpectralOperator,
                tolerance: float = SCATTER_TOL, window: float = 1.0) -> RunVerdict:
    """Classify a run as blow-up, scattering or bounded."""
    if traj.blowup is not None:
        return RunVerdict.BLOWUP
    report = scattering_detector(traj.snapshots, op, tolerance=tolerance,
                                 window=window)
    return RunVerdict.SCATTERS if report.scatters else RunVerdict.BOUNDED


def dispersive_fit(op: SpectralOperator, phi: ReducedField, r_exponent: float,
                   window: Tuple[float, float], samples: int = 50) -> DispersiveFit:
    """Fit the log-log slope of ||U_lambda(t) phi||_{L^r} on the window.

    The prediction is -N(1/2 - 1/r).

    :raises ValueError: r is outside 2 <= r < N/kappa_+ (r <= inf when
                        lambda = 0), where the dispersive estimate holds.
    """
    dim, lam = op.dim, op.lam
    if not calc.dispersive_range_contains(dim, lam, r_exponent):
        raise ValueError(f'r={r_exponent} is outside the dispersive range '
                         f'2 <= r < N/kappa_+ = {calc.dispersive_r_cap(dim, lam)}')
    t1, t2 = window
    if not 0 < t1 < t2:
        raise ValueError('window must satisfy 0 < t1 < t2')
    op.check_field(phi)
    times = np.geomspace(t1, t2, samples)
    modes = op.to_modes(phi.w)
    norms = [lr_norm(phi.replace(w=op.from_modes(np.exp(-1j * op.eigvals * t) * modes),
                                 t=t), r_exponent)
             for t in times]
    fit = linregress(np.log(times), np.log(norms))
    predicted = -dim * (0.5 - (0.0 if np.isinf(r_exponent) else 1 / r_exponent))
    return DispersiveFit(float(r_exponent), float(fit.slope), predicted,
                         (float(t1), float(t2)), float(fit.rvalue ** 2),
                         float(fit.stderr))


def gauge_consistency(u0: ReducedField, T: float, dt: float,
                      profile: AbstractDamping, params: ModelParams,
                      op: SpectralOperator) -> float:
    """Get ||u_gauge(T) - u_direct(T)|| / ||u_direct(T)||.

    u_gauge comes from evolving v and undoing the gauge, u_direct from
    damped_strang_step on the damped equation itself. Both are second order
    with different orderings, so the result decreases like dt^2.
    """
    traj = evolve(u0, T, dt, profile, params, op, sample_every=1 << 30,
                  snapshot_every=T)
    if not traj.completed:
        raise ValueError(f'gauged run stopped early: {traj.blowup}')
    final = traj.snapshots[-1]
    gauged = final.scaled(np.exp(-profile.integral(final.t)))
    direct = evolve_damped(u0, T, dt, profile, params, op)
    return float(np.sqrt(mass(gauged.replace(w=gauged.w - direct.w)) / mass(direct)))


def reversibility_error(u0: ReducedField, T: float, dt: float,
                        params: ModelParams, op: SpectralOperator) -> float:
    """Evolve undamped to T, conjugate, evolve again and conjugate back.

    Returns ||result - u0|| / ||u0||.
    """
    profile = Zero()
    forward = evolve(u0, T, dt, profile, params, op, sample_every=1 << 30,
                     snapshot_every=T)
    back = evolve(forward.snapshots[-1].conjugate(), T, dt, profile, params, op,
                  sample_every=1 << 30, snapshot_every=T)
    result = back.snapshots[-1].conjugate()
    return float(np.sqrt(mass(result.replace(w=result.w - u0.w)) / mass(u0)))


def norm_equivalence(grid: RadialGrid, dim: int, lams: Sequence[float],
                     samples: int, rng: np.random.Generator) -> List[NormEquivalence]:
    """Get the extreme ratios ||f||^2_{H^1_lambda} / ||f||^2_{H^1} over random fields."""
    fields = [random_smooth_field(grid, dim, rng) for _ in range(samples)]
    free = build_operator(grid, dim, 0.0)
    plain = np.array([mass(f) + quadratic_form(free, f) for f in fields])
    results = []
    for lam in lams:
        op = build_operator(grid, dim, lam)
        ratios = np.array([h1_lambda_norm(op, f) ** 2 for f in fields]) / plain
        results.append(NormEquivalence(float(lam), float(ratios.min()),
                                       float(ratios.max())))
    return results


def hardy_family(grid: RadialGrid, dim: int,
                 epsilons: Sequence[float]) -> List[ReducedField]:
    """Get fields with w = r^(1/2 + eps) e^(-8 r/R), near-optimal as eps -> 0."""
    return [ReducedField(grid, dim, grid.r ** (0.5 + eps) * np.exp(-8 * grid.r / grid.R))
            for eps in epsilons]


def hardy_check(grid: RadialGrid, dim: int, samples: int,
                rng: np.random.Generator,
                epsilons: Sequence[float] = (0.4, 0.2, 0.1),
                slack: float = HARDY_SLACK) -> HardyReport:
    """Check the Hardy bound on random fields and the near-optimizer family.

    Passes when every ratio is at least lambda_N (1 - slack) and the family
    ratios decrease as eps decreases.
    """
    op = build_operator(grid, dim, 0.0)
    lambda_n = calc.lambda_n(dim)
    ratios = [hardy_ratio(op, random_smooth_field(grid, dim, rng))
              for _ in range(samples)]
    family = tuple(hardy_ratio(op, f) for f in hardy_family(grid, dim, epsilons))
    floor = lambda_n * (1 - slack)
    passed = (min(ratios) >= floor and min(family) >= floor
              and all(later < earlier for earlier, later in zip(family, family[1:])))
    return HardyReport(dim, lambda_n, float(min(ratios)), family, bool(passed))


@lru_cache(maxsize=4)
def _operator(grid: RadialGrid, dim: int, lam: float) -> SpectralOperator:
    return build_operator(grid, dim, lam)


def _run_point(job: Tuple[Any, ...]) -> ScanRow:
    """Run one scan point; top level so worker processes can unpickle it."""
    (value, params, grid, w, profile, T, dt, snapshot_every, tolerance,
     window, monotone_window) = job
    op = _operator(grid, params.N, params.lam)
    u0 = ReducedField(grid, params.N, w)
    traj = evolve(u0, T, dt, profile, params, op, snapshot_every=snapshot_every)
    verdict = run_verdict(traj, op, tolerance, monotone_window)
    rate = None
    if verdict is not RunVerdict.BLOWUP and window is not None:
        try:
            rate = decay_fit(traj, 'sqrtK_norm_sq', window).rate
        except ValueError:
            rate = None
    return ScanRow(float(value), float(np.sqrt(mass(u0))), verdict, rate,
                   float(traj.records[-1].t))


def run_points(jobs: Sequence[Tuple[Any, ...]], workers: int = 1) -> List[ScanRow]:
    """Run scan points in order, in a process pool when workers > 1."""
    if workers <= 1:
        return [_run_point(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_run_point, jobs))


def threshold_scan(gs: GroundState, profile: AbstractDamping,
                   scales: Sequence[float], T: float, dt: float,
                   snapshot_every: float = 0.1, tolerance: float = SCATTER_TOL,
                   window: Optional[Tuple[float, float]] = None,
                   monotone_window: float = 1.0,
                   workers: int = 1) -> List[ScanRow]:
    """Run u0 = scale * bound * Q/||Q|| for each scale and tabulate verdicts.

    bound is the mass-critical threshold of threshold_norms, so scales
    below 1 satisfy the scattering hypothesis.

    :raises ValueError: Empty scale list or params not mass-critical.
    """
    if not scales:
        raise ValueError('scales can not be empty')
    bound = threshold_norms(gs)
    unit = gs.Q.w / gs.norm_q
    jobs = [(scale, gs.params, gs.Q.grid, scale * bound * unit, profile, T, dt,
             snapshot_every, tolerance, window, monotone_window) for scale in scales]
    logger.info('threshold scan over %d scales (bound %.6g)', len(jobs), bound)
    return run_points(jobs, workers)


def a_star_search(params: ModelParams, u0: ReducedField, gammas: Sequence[float],
                  T: float, dt: float, snapshot_every: float = 0.1,
                  tolerance: float = SCATTER_TOL, c0: float = 1.0,
                  monotone_window: float = 1.0,
                  workers: int = 1) -> AStarReport:
    """Scan constant damping gamma and report the smallest one that scatters.

    Next to it: the heuristic ||u0||_{H^1}^theta / theta (intercritical, up to
    an unknown constant), whether the bootstrap closes for a = ||u0||_{H^1}
    and b = 1/gamma, and a** with the given c0 (energy-critical).

    :raises ValueError: Params neither intercritical nor energy-critical, or
                        gammas not ascending and positive.
    """
    regime = classify_regime(params)
    if regime not in (Regime.INTERCRITICAL, Regime.ENERGY_CRITICAL):
        raise ValueError('a_star_search needs intercritical or energy-critical params')
    gammas = [float(gamma) for gamma in gammas]
    if not gammas or gammas[0] <= 0 or any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError('gammas must be positive and ascending')
    op = _operator(u0.grid, params.N, params.lam)
    h1 = h1_lambda_norm(op, u0)
    jobs = [(gamma, params, u0.grid, u0.w, Constant(gamma), T, dt, snapshot_every,
             tolerance, None, monotone_window) for gamma in gammas]
    rows = run_points(jobs, workers)
    empirical = next((row.value for row in rows
                      if row.verdict is RunVerdict.SCATTERS), None)
    heuristic = closes = double_star = None
    if regime is Regime.INTERCRITICAL and params.b > 0:
        theta = intercritical_triple(params)[0]
        heuristic = calc.heuristic_a_star(h1, theta)
        if empirical is not None and theta > 1:
            closes = calc.bootstrap_closes(h1, 1 / empirical, theta)
    if regime is Regime.ENERGY_CRITICAL:
        double_star = calc.a_double_star(params.p, c0, h1)
    logger.info('a* search: empirical=%s, heuristic=%s, a**=%s', empirical,
                heuristic, double_star)
    return AStarReport(empirical, tuple(rows), h1, heuristic, double_star, closes)


def dispersive_scan(params: ModelParams, grid: RadialGrid,
                    r_values: Sequence[float], window: Tuple[float, float],
                    width: float = 2.0) -> List[DispersiveFit]:
    """Fit the dispersive slope for each r on a Gaussian of the given width."""
    if not r_values:
        raise ValueError('r_values can not be empty')
    op = _operator(grid, params.N, params.lam)
    phi = gaussian(grid, params.N, width)
    return [dispersive_fit(op, phi, r, window) for r in r_values]


def mass_subcritical_prediction(profile: AbstractDamping, T: float) -> float:
    """Get 2 a_lower, the predicted decay rate of <K u, u>."""
    return 2 * slope_extremes(profile, T)[0]
