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

"""Closed-form exponents, thresholds and admissibility checks.

Everything here is pure arithmetic on the model constants, so it is safe to
call from any number of workers.
"""

from math import exp, gamma, inf, isinf, log, pi, sqrt
from numbers import Integral, Real
from typing import Optional, Tuple

# Absolute tolerance for the exponent equalities (s_c = 0, s_c = 1, ...).
TOLERANCE = 1e-12


def _check_dim(dim: int) -> None:
    if not isinstance(dim, Integral) or isinstance(dim, bool):
        raise TypeError('dim must be integer')
    if dim < 3:
        raise ValueError('dim must be >= 3')


def _check_real(name: str, value: float) -> None:
    if not isinstance(value, Real) or isinstance(value, bool):
        raise TypeError(f'{name} must be a real number')


def _check_b(b: float) -> None:
    _check_real('b', b)
    if not 0 <= b < 2:
        raise ValueError('b must satisfy 0 <= b < 2')


def unit_sphere_area(dim: int) -> float:
    """Area of the unit sphere in R^dim, the radial integration weight."""
    _check_dim(dim)
    return 2 * pi ** (dim / 2) / gamma(dim / 2)


def lambda_n(dim: int) -> float:
    """Compute the sharp Hardy constant (dim - 2)^2 / 4."""
    _check_dim(dim)
    return (dim - 2) ** 2 / 4


def kappa(dim: int, lam: float) -> float:
    """Compute sqrt(lambda_N) - sqrt(lambda_N + lambda).

    Decreasing in lambda, zero at lambda = 0 and equal to sqrt(lambda_N) at
    the Hardy endpoint lambda = -lambda_N.
    """
    _check_real('lam', lam)
    hardy = lambda_n(dim)
    if lam < -hardy:
        raise ValueError(f'lam must be >= -lambda_N = {-hardy}')
    return sqrt(hardy) - sqrt(hardy + lam)


def critical_sobolev_exponent(dim: int, b: float, p: float) -> float:
    """Compute the scaling-critical Sobolev index N/2 - (2 - b)/(p - 1)."""
    _check_dim(dim)
    _check_b(b)
    _check_real('p', p)
    if p <= 1:
        raise ValueError('p must be > 1')
    return dim / 2 - (2 - b) / (p - 1)


def mass_critical_exponent(dim: int, b: float) -> float:
    """Get the p for which s_c = 0."""
    _check_dim(dim)
    _check_b(b)
    return 1 + (4 - 2 * b) / dim


def energy_critical_exponent(dim: int, b: float) -> float:
    """Get the p for which s_c = 1, that is (N + 2 - 2b)/(N - 2)."""
    _check_dim(dim)
    _check_b(b)
    return 1 + (4 - 2 * b) / (dim - 2)


def gn_upper_exponent(dim: int, b: float) -> float:
    """Get the (excluded) upper end of the Gagliardo-Nirenberg range of p."""
    _check_dim(dim)
    _check_b(b)
    return 1 + 2 * (2 - b) / (dim - 2)


def gn_exponent(dim: int, b: float, p: float) -> float:
    """Compute nu = N(p - 1)/2 + b, the gradient power in the G-N inequality.

    The sharp constant only exists for 1 < p < 1 + 2(2 - b)/(N - 2), so
    exponents outside that range are rejected.
    """
    _check_real('p', p)
    upper = gn_upper_exponent(dim, b)
    if not 1 < p < upper:
        raise ValueError(f'p must satisfy 1 < p < {upper} for the '
                         f'Gagliardo-Nirenberg inequality')
    return dim * (p - 1) / 2 + b


def conjectured_scattering_exponent(dim: int, b: float) -> float:
    """Get the conjectured scattering threshold p* = 1 + (2 - 2b)/N.

    Metadata only: no check in this package relies on it.
    """
    _check_dim(dim)
    _check_b(b)
    return 1 + (2 - 2 * b) / dim


def _inverse(value: float) -> float:
    return 0.0 if isinf(value) else 1 / value


def is_admissible(dim: int, q: float, r: float) -> bool:
    """Check 2/q = N(1/2 - 1/r) with 2 <= r <= 2N/(N - 2); q may be inf."""
    _check_dim(dim)
    _check_real('q', q)
    _check_real('r', r)
    if q <= 0 or r <= 0:
        return False
    endpoint = 2 * dim / (dim - 2)
    if not 2 - TOLERANCE <= r <= endpoint + TOLERANCE:
        return False
    return abs(2 * _inverse(q) - dim * (0.5 - 1 / r)) <= TOLERANCE


def is_s_admissible(dim: int, s: float, q: float, r: float) -> bool:
    """Check 2/q = N(1/2 - 1/r) - s with 2N/(N - 2s) < r < 2N/(N - 2), s > 0."""
    _check_dim(dim)
    _check_real('s', s)
    _check_real('q', q)
    _check_real('r', r)
    if s <= 0 or q <= 0 or r <= 0:
        return False
    lower = 2 * dim / (dim - 2 * s) if dim > 2 * s else inf
    if not lower < r < 2 * dim / (dim - 2):
        return False
    return abs(2 * _inverse(q) - (dim * (0.5 - 1 / r) - s)) <= TOLERANCE


def _check_intercritical(dim: int, b: float, p: float) -> None:
    lower = mass_critical_exponent(dim, b)
    upper = energy_critical_exponent(dim, b)
    _check_real('p', p)
    if not lower + TOLERANCE < p < upper - TOLERANCE:
        raise ValueError(f'p must be intercritical: {lower} < p < {upper}')


def intercritical_triple(dim: int, b: float,
                         p: float) -> Tuple[float, float, float]:
    """Compute the exponents (theta, r, q) used in the small-data argument.

    The pair (q, r) is admissible and (theta, r) is s_c-admissible. With
    1/theta + 1/theta_tilde = N(1/2 - 1/r) the two Hoelder bookkeeping
    identities theta_tilde' * p = theta and 1/q' = 1/q + (p - 1)/theta hold;
    both are verified before returning.
    """
    _check_intercritical(dim, b, p)
    if b <= 0:
        raise ValueError('b must be > 0 for the intercritical triple')
    theta = 2 * (p + 1) * (p - 1) / (4 - 2 * b - (dim - 2) * (p - 1))
    r = (p + 1) / (1 - b / dim)
    q = 4 * (1 + p) / (2 * b + dim * (p - 1))

    s_c = critical_sobolev_exponent(dim, b, p)
    theta_tilde = 1 / (dim * (0.5 - 1 / r) - 1 / theta)
    theta_tilde_dual = theta_tilde / (theta_tilde - 1)
    q_dual = q / (q - 1)
    checks = (
        is_admissible(dim, q, r),
        is_s_admissible(dim, s_c, theta, r),
        abs(theta_tilde_dual * p - theta) <= TOLERANCE * theta,
        abs(1 / q_dual - 1 / q - (p - 1) / theta) <= TOLERANCE,
        theta > max(1, p - 1),
    )
    if not all(checks):
        raise ArithmeticError(f'intercritical triple bookkeeping failed: {checks}')
    return theta, r, q


def qr_star(dim: int, b: float, p: float,
            eta: Optional[float] = None) -> Tuple[float, float]:
    """Compute the admissible pair (q_*, r_*) of the small-data estimate.

    :param eta: Small positive parameter in (0, p - 1); defaults to
                0.05 (p - 1).
    """
    _check_intercritical(dim, b, p)
    if eta is None:
        eta = 0.05 * (p - 1)
    _check_real('eta', eta)
    if not 0 < eta < p - 1:
        raise ValueError(f'eta must satisfy 0 < eta < {p - 1}')
    shift = dim * (p + 1) + 2 * b - 2 * dim
    q_star = (4 * (p - 1) * (p + 1 - eta)
              / ((p - 1) * shift - eta * (shift - 4)))
    r_star = (dim * (p - 1) * (p + 1 - eta)
              / ((p - 1) * (dim - b) - eta * (2 - b)))
    if not is_admissible(dim, q_star, r_star):
        raise ArithmeticError(f'(q_*, r_*) = ({q_star}, {r_star}) is not admissible')
    return q_star, r_star


def mass_critical_threshold_factor(dim: int, b: float) -> float:
    """Compute (N/(N + 2 - b))^(N/(4 - 2b)), always inside (0, 1).

    Raised to the mass-critical p - 1 it gives N/(N + 2 - b), the bound on
    rho = (||u0|| / ||Q||)^(p - 1) that makes the Gronwall argument decay.
    """
    _check_dim(dim)
    _check_b(b)
    return (dim / (dim + 2 - b)) ** (dim / (4 - 2 * b))


def a_double_star(p: float, c0: float, u0_h1: float) -> float:
    """Compute the explicit energy-critical damping size a**.

    a** = [ln((2 c0)^(-p) ||u0||_H1^(1 - p))]_- / (1 - p), where [x]_- is
    min(x, 0). Always nonnegative. c0 is the (unknown) sharp Strichartz
    constant and is an input.
    """
    for name, value in (('p', p), ('c0', c0), ('u0_h1', u0_h1)):
        _check_real(name, value)
    if p <= 1:
        raise ValueError('p must be > 1')
    if c0 <= 0 or u0_h1 <= 0:
        raise ValueError('c0 and u0_h1 must be positive')
    exponent = -p * log(2 * c0) + (1 - p) * log(u0_h1)
    return min(exponent, 0.0) / (1 - p)


def mass_critical_decay_rate(p: float, rho: float, a_lower: float) -> float:
    """Compute the decay rate (2 - (p - 1) rho/(1 - rho)) a_lower.

    This is the exponential rate predicted for ||sqrt(K) u(t)||^2 in the
    mass-critical case. It requires (p - 1) rho/(1 - rho) < 2; otherwise the
    bound carries no decay and ValueError is raised.
    """
    for name, value in (('p', p), ('rho', rho), ('a_lower', a_lower)):
        _check_real(name, value)
    if not 0 <= rho < 1:
        raise ValueError('rho must satisfy 0 <= rho < 1')
    if a_lower < 0:
        raise ValueError('a_lower must be >= 0')
    growth = (p - 1) * rho / (1 - rho)
    if growth >= 2:
        raise ValueError(f'(p - 1) rho/(1 - rho) = {growth} must be < 2')
    return (2 - growth) * a_lower


def energy_critical_lambda_floor(dim: int, b: float) -> float:
    """Get the lower bound on lambda for the energy-critical theory."""
    _check_dim(dim)
    _check_b(b)
    top = (dim + 2 - 2 * b) ** 2
    return -(top - 4) / top * lambda_n(dim)


def energy_critical_pair(dim: int, b: float) -> Tuple[float, float]:
    """Get the admissible pair (alpha(r), r) of the energy-critical theory."""
    _check_dim(dim)
    _check_b(b)
    r = 2 * dim * (dim + 2 - 2 * b) / (dim ** 2 - 2 * dim * b + 4)
    alpha = 2 / (dim * (0.5 - 1 / r))
    return alpha, r


def lebesgue_equivalence_range(dim: int, lam: float) -> Tuple[float, float]:
    """Get the open range of r where ||sqrt(K) f||_r ~ ||grad f||_r."""
    k = kappa(dim, lam)
    if lam > 0:
        return 1.0, float(dim)
    if lam < 0:
        return dim / (dim - k), dim / (1 + k)
    return 1.0, inf


def dispersive_r_cap(dim: int, lam: float) -> float:
    """Get N/kappa_+, the (excluded) upper end of the dispersive range.

    The convention 1/0 = inf applies, and at lambda = 0 the endpoint inf
    itself is allowed (see dispersive_range_contains).
    """
    k = kappa(dim, lam)
    return dim / k if k > 0 else inf


def dispersive_range_contains(dim: int, lam: float, r: float) -> bool:
    """Check 2 <= r < N/kappa_+ (or 2 <= r <= inf when lambda = 0)."""
    _check_real('r', r)
    if r < 2:
        return False
    if lam == 0:
        return True
    return r < dispersive_r_cap(dim, lam)


def bootstrap_closes(a: float, b: float, theta: float) -> bool:
    """Check a b^(1/(theta - 1)) < (theta - 1) theta^(theta/(1 - theta))."""
    for name, value in (('a', a), ('b', b), ('theta', theta)):
        _check_real(name, value)
    if a <= 0 or b <= 0 or theta <= 1:
        raise ValueError('a, b must be positive and theta > 1')
    lhs = log(a) + log(b) / (theta - 1)
    rhs = log(theta - 1) + theta / (1 - theta) * log(theta)
    return lhs < rhs


def heuristic_a_star(u0_h1: float, theta: float) -> float:
    """Get the scaling ||u0||_H1^theta / theta of the a* heuristic.

    The constant in front is not known; only the trend in ||u0|| is
    meaningful.
    """
    _check_real('u0_h1', u0_h1)
    _check_real('theta', theta)
    if u0_h1 <= 0 or theta <= 0:
        raise ValueError('u0_h1 and theta must be positive')
    return exp(theta * log(u0_h1)) / theta
