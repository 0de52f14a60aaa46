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

"""Model constants (N, b, p, lambda, mu) and the exponents derived from them."""

from enum import Enum
from numbers import Integral, Real
from typing import Any, Dict, NamedTuple, Optional, Tuple

from . import calc
from .base import AbstractRepr


class Regime(Enum):
    """Position of p relative to the mass- and energy-critical exponents."""

    MASS_SUBCRITICAL = 'mass-subcritical'
    MASS_CRITICAL = 'mass-critical'
    INTERCRITICAL = 'intercritical'
    ENERGY_CRITICAL = 'energy-critical'
    SUPERCRITICAL = 'supercritical'


class DerivedExponents(NamedTuple):
    """Exponents and thresholds that only depend on the model constants.

    ``nu`` is None when p lies outside the Gagliardo-Nirenberg range.
    """

    lambda_n: float
    kappa: float
    sc: float
    nu: Optional[float]
    regime: Regime


class ModelParams(AbstractRepr):
    """The model constants of the damped equation.

    i u_t = K_lambda u + mu |x|^-b |u|^(p-1) u - i a(t) u, with
    K_lambda = -Laplacian + lambda |x|^-2 in dimension N. mu = -1 is the
    focusing case, mu = +1 the defocusing one.
    """

    __slots__ = ('_N', '_b', '_p', '_lam', '_mu')

    def __init__(self, N: int = 3, b: float = 0.5, p: float = 2.0,
                 lam: float = 0.0, mu: int = -1):
        """Validate and store the model constants."""
        self._lam = None
        self.N = N
        self.b = b
        self.p = p
        self.lam = lam
        self.mu = mu

    def __eq__(self, other: Any) -> bool:
        """Compare by value."""
        if not isinstance(other, ModelParams):
            return NotImplemented
        return self.as_tuple() == other.as_tuple()

    def __hash__(self) -> int:
        """Hash by value."""
        return hash(self.as_tuple())

    def __getstate__(self) -> Tuple[int, float, float, float, int]:
        """Get the state to pickle (needed to ship params to workers)."""
        return self.as_tuple()

    def __setstate__(self, state: Tuple[int, float, float, float, int]) -> None:
        """Restore a pickled instance."""
        self.__init__(*state)

    @property
    def N(self) -> int:
        """Get the space dimension."""
        return self._N

    @N.setter
    def N(self, value: int) -> None:
        """Set the space dimension, N >= 3."""
        if not isinstance(value, Integral) or isinstance(value, bool):
            raise TypeError('N must be integer')
        if value < 3:
            raise ValueError('N must be >= 3')
        if self._lam is not None and self._lam <= -calc.lambda_n(int(value)):
            raise ValueError(f'N={value} makes lambda={self._lam} fall at or '
                             f'below -lambda_N')
        self._N = int(value)

    @property
    def b(self) -> float:
        """Get the inhomogeneity exponent."""
        return self._b

    @b.setter
    def b(self, value: float) -> None:
        """Set the inhomogeneity exponent, 0 <= b < 2."""
        if not isinstance(value, Real) or isinstance(value, bool):
            raise TypeError('b must be a real number')
        if not 0 <= value < 2:
            raise ValueError('b must satisfy 0 <= b < 2')
        self._b = float(value)

    @property
    def p(self) -> float:
        """Get the nonlinearity exponent."""
        return self._p

    @p.setter
    def p(self, value: float) -> None:
        """Set the nonlinearity exponent, p > 1."""
        if not isinstance(value, Real) or isinstance(value, bool):
            raise TypeError('p must be a real number')
        if value <= 1:
            raise ValueError('p must be > 1')
        self._p = float(value)

    @property
    def lam(self) -> float:
        """Get the strength of the inverse-square potential."""
        return self._lam

    @lam.setter
    def lam(self, value: float) -> None:
        """Set lambda, strictly above -lambda_N."""
        if not isinstance(value, Real) or isinstance(value, bool):
            raise TypeError('lam must be a real number')
        floor = -calc.lambda_n(self.N)
        if value <= floor:
            raise ValueError(f'lam must be > -lambda_N = {floor}')
        self._lam = float(value)

    @property
    def mu(self) -> int:
        """Get the sign of the nonlinearity."""
        return self._mu

    @mu.setter
    def mu(self, value: int) -> None:
        """Set mu: -1 focusing, +1 defocusing."""
        if not isinstance(value, Integral) or isinstance(value, bool):
            raise TypeError('mu must be integer')
        if value not in (-1, 1):
            raise ValueError('mu must be -1 (focusing) or +1 (defocusing)')
        self._mu = int(value)

    @property
    def focusing(self) -> bool:
        """Whether the nonlinearity is focusing."""
        return self.mu == -1

    def as_tuple(self) -> Tuple[int, float, float, float, int]:
        """Get (N, b, p, lambda, mu)."""
        return self.N, self.b, self.p, self.lam, self.mu

    def as_dict(self) -> Dict[str, Any]:
        """Get the constants keyed as in the configuration file."""
        return {'N': self.N, 'b': self.b, 'p': self.p, 'lambda': self.lam,
                'mu': self.mu}

    def replace(self, **changes: Any) -> 'ModelParams':
        """Get a copy with some constants changed."""
        values = dict(zip(('N', 'b', 'p', 'lam', 'mu'), self.as_tuple()))
        values.update(changes)
        return ModelParams(**values)


def critical_sobolev(params: ModelParams) -> float:
    """Compute s_c = N/2 - (2 - b)/(p - 1)."""
    return calc.critical_sobolev_exponent(params.N, params.b, params.p)


def classify_regime(params: ModelParams) -> Regime:
    """Classify p by the sign of s_c and of s_c - 1."""
    sc = critical_sobolev(params)
    if abs(sc) <= calc.TOLERANCE:
        return Regime.MASS_CRITICAL
    if abs(sc - 1) <= calc.TOLERANCE:
        return Regime.ENERGY_CRITICAL
    if sc < 0:
        return Regime.MASS_SUBCRITICAL
    if sc < 1:
        return Regime.INTERCRITICAL
    return Regime.SUPERCRITICAL


def gn_exponent_nu(params: ModelParams) -> float:
    """Compute nu = N(p - 1)/2 + b; p must be in the G-N range."""
    return calc.gn_exponent(params.N, params.b, params.p)


def derived_exponents(params: ModelParams) -> DerivedExponents:
    """Collect lambda_N, kappa, s_c, nu and the regime."""
    try:
        nu = gn_exponent_nu(params)
    except ValueError:
        nu = None
    return DerivedExponents(
        lambda_n=calc.lambda_n(params.N),
        kappa=calc.kappa(params.N, params.lam),
        sc=critical_sobolev(params),
        nu=nu,
        regime=classify_regime(params),
    )


def intercritical_triple(params: ModelParams) -> Tuple[float, float, float]:
    """Get (theta, r, q) for intercritical params (see calc)."""
    if classify_regime(params) is not Regime.INTERCRITICAL:
        raise ValueError('the triple (theta, r, q) needs intercritical params')
    return calc.intercritical_triple(params.N, params.b, params.p)


def qr_star(params: ModelParams,
            eta: Optional[float] = None) -> Tuple[float, float]:
    """Get (q_*, r_*) for intercritical params (see calc)."""
    if classify_regime(params) is not Regime.INTERCRITICAL:
        raise ValueError('the pair (q_*, r_*) needs intercritical params')
    return calc.qr_star(params.N, params.b, params.p, eta)


def mass_critical_params(N: int = 3, b: float = 0.5, lam: float = 0.0,
                         mu: int = -1) -> ModelParams:
    """Get the params whose p is exactly mass-critical."""
    return ModelParams(N, b, calc.mass_critical_exponent(N, b), lam, mu)
