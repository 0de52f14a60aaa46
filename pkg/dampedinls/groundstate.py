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

"""Ground state of the Gagliardo-Nirenberg inequality with inverse-square term.

The Weinstein quotient

    J(f) = ||f||^(p+1-nu) <K_lambda f, f>^(nu/2) / P(f),
    P(f) = integral of |x|^-b |f|^(p+1),

is invariant under f -> c f(beta x); its minimum is 1/K_opt. On a grid the
dilation symmetry is broken and J keeps decreasing as f concentrates at the
grid scale, so the descent runs on the action quotient

    R(f) = <(K_lambda + 1) f, f>^((p+1)/2) / P(f),

which only keeps the amplitude symmetry. Its minimizer, scaled, is the
ground state Q solving

    K_lambda Q + Q = |x|^-b |Q|^(p-1) Q.

The iteration stops on the Euler-Lagrange residual itself. The Pohozaev
ratios <K Q, Q>/||Q||^2 = nu/(p+1-nu) and P(Q)/<K Q, Q> = (p+1)/nu and the
gap |K_opt J(Q) - 1| are measured afterwards; on the grid they hold up to
the O(h^2) discretization error.

A numerical minimizer is only known to be a local minimum; global
optimality is assumed.
"""

import logging
from pathlib import Path
from typing import Any, Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solveh_banded
from scipy.optimize import minimize_scalar

from . import calc
from .artifacts import PathLike, read_csv, read_json, write_csv, write_json
from .base import AbstractRepr
from .errors import ConvergenceError
from .params import ModelParams, Regime, classify_regime, gn_exponent_nu
from .radial import (RadialGrid, ReducedField, SpectralOperator, gaussian, mass,
                     normalized, potential_term, potential_weights,
                     quadratic_form)

logger = logging.getLogger(__name__)

TOLERANCE = 1e-10
MAX_ITER = 20000
# Pohozaev residuals and quotient gap carry the O(h^2) grid error.
IDENTITY_TOLERANCE = 1e-2
EL_TOLERANCE = 1e-8
GN_SLACK = 1e-6
# Armijo sufficient decrease constant, maximum number of halvings and the
# relative round-off allowed in the decrease test.
ARMIJO = 1e-4
BACKTRACKS = 60
ROUNDOFF = 1e-14
# Dilations searched by rescale_to_euler_lagrange: a log grid on
# [1/BETA_RANGE, BETA_RANGE], then bounded Brent polishing.
BETA_RANGE = 8.0
BETA_POINTS = 41


class GroundState(AbstractRepr):
    """A ground state Q, its certificates and the sharp constant it yields.

    history holds log R (up to a constant) after every accepted descent step.
    """

    __slots__ = ('params', 'Q', 'mass_q', 'quadform_q', 'potential_q', 'k_opt',
                 'pohozaev_residuals', 'el_residual', 'min_quotient',
                 'iterations', 'dilation', 'amplitude', 'history')

    def __init__(self, params: ModelParams, Q: ReducedField, k_opt: float,
                 pohozaev_residuals: Tuple[float, float], el_residual: float,
                 min_quotient: float, iterations: int = 0,
                 dilation: float = 1.0, amplitude: float = 1.0,
                 quadform_q: Optional[float] = None,
                 history: Sequence[float] = ()):
        """Store the ground state and its certificates."""
        self.params = params
        self.Q = Q
        self.mass_q = mass(Q)
        self.quadform_q = quadform_q
        self.potential_q = potential_term(Q, params.b, params.p)
        self.k_opt = k_opt
        self.pohozaev_residuals = tuple(pohozaev_residuals)
        self.el_residual = el_residual
        self.min_quotient = min_quotient
        self.iterations = iterations
        self.dilation = dilation
        self.amplitude = amplitude
        self.history = np.asarray(history, dtype=float)

    @property
    def norm_q(self) -> float:
        """Get ||Q||."""
        return float(np.sqrt(self.mass_q))

    @property
    def quotient_gap(self) -> float:
        """Get |K_opt J(Q) - 1|: closed form against the measured quotient."""
        return abs(self.k_opt * self.min_quotient - 1)

    def certified(self, tolerance: float = IDENTITY_TOLERANCE,
                  el_tolerance: float = EL_TOLERANCE) -> bool:
        """Whether Q solves the equation and meets the Pohozaev identities.

        :param tolerance: Bound on both Pohozaev residuals and the quotient gap.
        :param el_tolerance: Bound on the Euler-Lagrange residual.
        """
        return (self.el_residual <= el_tolerance
                and max(self.pohozaev_residuals) <= tolerance
                and self.quotient_gap <= tolerance)

    def to_dict(self) -> Dict[str, Any]:
        """Get the JSON summary (without the profile)."""
        return {
            'params': self.params.as_dict(),
            'grid': self.Q.grid.as_dict(),
            'mass_q': self.mass_q,
            'norm_q': self.norm_q,
            'quadform_q': self.quadform_q,
            'potential_q': self.potential_q,
            'k_opt': self.k_opt,
            'min_quotient': self.min_quotient,
            'quotient_gap': self.quotient_gap,
            'pohozaev_residuals': list(self.pohozaev_residuals),
            'el_residual': self.el_residual,
            'iterations': self.iterations,
            'dilation': self.dilation,
            'amplitude': self.amplitude,
            'optimality': 'local minimum; global optimality assumed',
        }


class GNReport(NamedTuple):
    """Gagliardo-Nirenberg ratios P(u)/(K_opt ||u||^(p+1-nu) <Ku,u>^(nu/2))."""

    ratios: Tuple[float, ...]
    max_ratio: float
    argmax: int
    passed: bool


def _check_hypotheses(params: ModelParams, op: SpectralOperator) -> float:
    if op.dim != params.N or op.lam != params.lam:
        raise ValueError('operator and params disagree on N or lambda')
    return gn_exponent_nu(params)


def weinstein_quotient(field: ReducedField, params: ModelParams,
                       op: SpectralOperator) -> float:
    """Get J(f) = ||f||^(p+1-nu) <K f, f>^(nu/2) / P(f).

    :raises ValueError: f is zero, P(f) vanishes or p is outside the G-N range.
    """
    nu = _check_hypotheses(params, op)
    p = params.p
    current_mass = mass(field)
    potential = potential_term(field, params.b, p)
    if current_mass == 0:
        raise ValueError('the quotient is undefined for the zero field')
    if potential == 0:
        raise ValueError('the quotient is undefined when P(f) = 0')
    log_j = ((p + 1 - nu) / 2 * np.log(current_mass)
             + nu / 2 * np.log(quadratic_form(op, field)) - np.log(potential))
    return float(np.exp(log_j))


def sharp_constant(params: ModelParams, mass_q: float) -> float:
    """Get K_opt = (p+1)/(p+1-nu) ((p+1-nu)/nu)^(nu/2) ||Q||^(1-p).

    At the mass-critical p (nu = 2) this is (p+1)/2 ||Q||^(1-p).
    """
    nu = gn_exponent_nu(params)
    p = params.p
    return ((p + 1) / (p + 1 - nu) * ((p + 1 - nu) / nu) ** (nu / 2)
            * mass_q ** ((1 - p) / 2))


class _ActionQuotient:
    """log R for R(w) = <(T + 1) w, w>^((p+1)/2) / P(w), in raw sums.

    R keeps the amplitude symmetry of J but not the dilation one; its
    minimum over the dilations of f is a fixed multiple of J(f), so
    descending on log R is descending on log J with the dilation pinned.
    At a critical point (T + 1) w = (A/P) W |w|^(p-1) w, which the amplitude
    (A/P)^(1/(p-1)) turns into the Euler-Lagrange equation.
    """

    def __init__(self, params: ModelParams, op: SpectralOperator):
        self.op = op
        self.p = params.p
        self.weights = potential_weights(op.grid, params.N, params.b, params.p)
        self.banded = np.zeros((2, op.grid.n))
        self.banded[0, 1:] = op.offdiag
        self.banded[1] = op.diag + 1

    def nonlinear(self, w: np.ndarray) -> np.ndarray:
        return self.weights * np.abs(w) ** (self.p - 1) * w

    def sums(self, w: np.ndarray) -> Tuple[float, float]:
        return (float(w @ self.op.apply(w) + w @ w),
                float(self.weights @ np.abs(w) ** (self.p + 1)))

    def value(self, w: np.ndarray) -> float:
        action, potential = self.sums(w)
        return (self.p + 1) / 2 * np.log(action) - np.log(potential)

    def precondition(self, vector: np.ndarray) -> np.ndarray:
        """Get (T + 1)^-1 vector."""
        return solveh_banded(self.banded, vector)

    def direction(self, w: np.ndarray) -> Tuple[np.ndarray, float]:
        """Get -(A/(p+1)) (T + 1)^-1 grad log R and the slope along it."""
        action, potential = self.sums(w)
        if potential <= 0:
            raise ValueError('the quotient is undefined when P(f) = 0')
        direction = action / potential * self.precondition(self.nonlinear(w)) - w
        slope = -(self.p + 1) / action * float(
            direction @ self.op.apply(direction) + direction @ direction)
        return direction, slope

    def amplitude_fit(self, w: np.ndarray) -> Tuple[float, float]:
        """Get the least squares s^(p-1) and the residual it leaves.

        Minimizes ||w - s^(p-1) (T + 1)^-1 W |w|^(p-1) w|| / ||w||, the
        relative Euler-Lagrange residual of s w.
        """
        image = self.precondition(self.nonlinear(w))
        norm = float(image @ image)
        if norm == 0:
            return 0.0, 1.0
        power = float(w @ image) / norm
        return power, float(np.linalg.norm(w - power * image) / np.linalg.norm(w))


def dilate(field: ReducedField, beta: float) -> ReducedField:
    """Get the reduced samples of u(beta r), cubic spline resampled.

    w(r) = r^((N-1)/2) u(r) becomes beta^(-(N-1)/2) w(beta r); w vanishes at
    r = 0 and r = R and is taken as zero beyond R.
    """
    if beta <= 0:
        raise ValueError('beta must be > 0')
    grid = field.grid
    nodes = np.concatenate(([0.0], grid.r, [grid.R]))
    values = np.concatenate(([0.0], field.w, [0.0]))
    spline = CubicSpline(nodes, values)
    points = beta * grid.r
    resampled = np.where(points < grid.R, spline(np.minimum(points, grid.R)), 0.0)
    return field.replace(w=beta ** (-(field.dim - 1) / 2) * resampled)


def _pohozaev_targets(params: ModelParams, nu: float) -> Tuple[float, float]:
    return nu / (params.p + 1 - nu), (params.p + 1) / nu


def pohozaev_residuals(field: ReducedField, params: ModelParams,
                       op: SpectralOperator) -> Tuple[float, float]:
    """Get the relative residuals of both Pohozaev ratios."""
    nu = _check_hypotheses(params, op)
    kinetic_ratio, potential_ratio = _pohozaev_targets(params, nu)
    quadform = quadratic_form(op, field)
    return (abs(quadform / mass(field) / kinetic_ratio - 1),
            abs(potential_term(field, params.b, params.p) / quadform
                / potential_ratio - 1))


def euler_lagrange_residual(field: ReducedField, params: ModelParams,
                            op: SpectralOperator) -> float:
    """Get ||(T + 1)^-1 (T Q + Q - W |Q|^(p-1) Q)|| / ||Q|| (H^-1 type)."""
    _check_hypotheses(params, op)
    quotient = _ActionQuotient(params, op)
    w = field.w
    residual = op.apply(w) + w - quotient.nonlinear(w)
    return float(np.linalg.norm(quotient.precondition(residual))
                 / np.linalg.norm(w))


def _amplitude(power: float, params: ModelParams, beta: float) -> float:
    if not (beta > 0 and power > 0 and np.isfinite(power)):
        raise ValueError(f'degenerate scaling: beta={beta}, s^(p-1)={power}')
    return float(power ** (1 / (params.p - 1)))


def _fit_scaling(phi: ReducedField, params: ModelParams,
                 op: SpectralOperator) -> Tuple[ReducedField, float, float]:
    quotient = _ActionQuotient(params, op)

    def residual(log_beta: float) -> float:
        dilated = phi if log_beta == 0 else dilate(phi, float(np.exp(log_beta)))
        return quotient.amplitude_fit(np.real(dilated.w))[1]

    grid = np.linspace(-np.log(BETA_RANGE), np.log(BETA_RANGE), BETA_POINTS)
    # the middle node is exactly log 1, where phi is used without resampling
    grid[BETA_POINTS // 2] = 0.0
    values = [residual(x) for x in grid]
    best = int(np.argmin(values))
    log_beta, value = float(grid[best]), values[best]
    low, high = grid[max(best - 1, 0)], grid[min(best + 1, BETA_POINTS - 1)]
    polished = minimize_scalar(residual, bounds=(low, high), method='bounded',
                               options={'xatol': 1e-10})
    if polished.fun < value:
        log_beta = float(polished.x)
    beta = float(np.exp(log_beta))
    dilated = phi if log_beta == 0 else dilate(phi, beta)
    power, _ = quotient.amplitude_fit(np.real(dilated.w))
    amplitude = _amplitude(power, params, beta)
    return dilated.scaled(amplitude), beta, amplitude


def rescale_to_euler_lagrange(phi: ReducedField, params: ModelParams,
                              op: SpectralOperator) -> ReducedField:
    """Get Q = s phi(beta .) closest to K Q + Q = |x|^-b |Q|^(p-1) Q.

    beta minimizes the Euler-Lagrange residual over a log grid of dilations,
    polished by bounded Brent; s is its least squares amplitude. The
    Pohozaev ratios are left to be checked afterwards.

    :raises ValueError: The scaling degenerates.
    """
    _check_hypotheses(params, op)
    op.check_field(phi)
    return _fit_scaling(phi, params, op)[0]


def minimize(params: ModelParams, op: SpectralOperator,
             init: Optional[ReducedField] = None, tol: float = TOLERANCE,
             max_iter: int = MAX_ITER) -> GroundState:
    """Minimize the action quotient and certify the ground state.

    Preconditioned gradient descent on log R with direction
    -(T + 1)^-1 grad, unit trial step, Armijo backtracking and projection
    onto positive profiles. Stops when the relative Euler-Lagrange residual
    of the amplitude-fitted iterate is at most tol.

    :param init: Positive initial profile; defaults to exp(-r^2).
    :raises ConvergenceError: max_iter reached or the line search stalled.
    """
    nu = _check_hypotheses(params, op)
    if init is None:
        init = gaussian(op.grid, params.N)
    op.check_field(init)
    quotient = _ActionQuotient(params, op)
    w = np.abs(np.real(init.w))
    w /= np.linalg.norm(w)
    value = quotient.value(w)
    history = [value]
    direction, slope = quotient.direction(w)
    residual = float(np.linalg.norm(direction))
    iterations = 0
    logger.info('minimizing the action quotient for %s (nu=%.6g)', params, nu)
    while residual > tol:
        if iterations >= max_iter:
            raise ConvergenceError(
                f'ground state not converged after {max_iter} iterations',
                {'el_residual': residual, 'log_quotient': value})
        iterations += 1
        step = 1.0
        for _ in range(BACKTRACKS):
            trial = np.abs(w + step * direction)
            trial_value = quotient.value(trial)
            if trial_value <= (value + ARMIJO * step * slope
                               + ROUNDOFF * max(1.0, abs(value))):
                break
            step /= 2
        else:
            raise ConvergenceError(
                f'line search stalled at iteration {iterations}',
                {'el_residual': residual, 'log_quotient': value})
        w = trial / np.linalg.norm(trial)
        value = quotient.value(w)
        history.append(value)
        direction, slope = quotient.direction(w)
        residual = float(np.linalg.norm(direction))
        if iterations % 100 == 0:
            logger.debug('iteration %d: log R=%.15g, residual=%.3e, step=%.3g',
                         iterations, value, residual, step)

    power, _ = quotient.amplitude_fit(w)
    amplitude = _amplitude(power, params, 1.0)
    Q = init.replace(w=amplitude * w)
    mass_q = mass(Q)
    state = GroundState(
        params=params, Q=Q, k_opt=sharp_constant(params, mass_q),
        pohozaev_residuals=pohozaev_residuals(Q, params, op),
        el_residual=euler_lagrange_residual(Q, params, op),
        min_quotient=weinstein_quotient(Q, params, op), iterations=iterations,
        amplitude=amplitude, quadform_q=quadratic_form(op, Q), history=history)
    logger.info('ground state after %d iterations: ||Q||^2=%.10g, K_opt=%.10g, '
                'Pohozaev residuals=(%.2e, %.2e), EL residual=%.2e, gap=%.2e',
                iterations, mass_q, state.k_opt, *state.pohozaev_residuals,
                state.el_residual, state.quotient_gap)
    return state


def gn_check(samples: Sequence[ReducedField], gs: GroundState,
             op: SpectralOperator, slack: Optional[float] = None) -> GNReport:
    """Check P(u) <= K_opt ||u||^(p+1-nu) <K u, u>^(nu/2) (1 + slack).

    :param slack: Defaults to the larger of 1e-6 and twice the quotient gap of
        gs, the grid defect of K_opt itself.
    """
    if not samples:
        raise ValueError('samples can not be empty')
    if slack is None:
        slack = max(GN_SLACK, 2 * gs.quotient_gap)
    ratios = tuple(1 / (gs.k_opt * weinstein_quotient(sample, gs.params, op))
                   for sample in samples)
    argmax = int(np.argmax(ratios))
    return GNReport(ratios, ratios[argmax], argmax,
                    ratios[argmax] <= 1 + slack)


def threshold_norms(gs: GroundState) -> float:
    """Get the L^2 bound (N/(N+2-b))^(N/(4-2b)) ||Q|| on mass-critical data.

    :raises ValueError: The ground state is not mass-critical.
    """
    params = gs.params
    if classify_regime(params) is not Regime.MASS_CRITICAL:
        raise ValueError('threshold_norms needs mass-critical params')
    return calc.mass_critical_threshold_factor(params.N, params.b) * gs.norm_q


def save_ground_state(gs: GroundState, directory: PathLike,
                      extra: Optional[Dict[str, Any]] = None) -> Path:
    """Write groundstate.json and the groundstate.csv profile (r, Q, w)."""
    directory = Path(directory)
    grid = gs.Q.grid
    write_csv(directory / 'groundstate.csv', ('r', 'Q', 'w'),
              np.column_stack((grid.r, gs.Q.u.real, gs.Q.w.real)))
    payload = gs.to_dict()
    payload['profile'] = 'groundstate.csv'
    payload.update(extra or {})
    return write_json(directory / 'groundstate.json', payload)


def load_ground_state(path: PathLike) -> GroundState:
    """Read a ground state written by save_ground_state."""
    path = Path(path)
    payload = read_json(path)
    model = payload['params']
    params = ModelParams(model['N'], model['b'], model['p'], model['lambda'],
                         model['mu'])
    grid = RadialGrid(payload['grid']['R'], payload['grid']['n'])
    columns, table = read_csv(path.parent / payload['profile'])
    Q = ReducedField(grid, params.N, table[:, columns.index('w')])
    return GroundState(
        params=params, Q=Q, k_opt=payload['k_opt'],
        pohozaev_residuals=tuple(payload['pohozaev_residuals']),
        el_residual=payload['el_residual'],
        min_quotient=payload['min_quotient'],
        iterations=payload['iterations'], dilation=payload['dilation'],
        amplitude=payload['amplitude'], quadform_q=payload['quadform_q'])
