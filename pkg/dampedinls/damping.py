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

"""Damping profiles a(t) >= 0, their integral A(t) and the gauge factors.

Every profile evaluates on scalars and on numpy arrays alike; negative times
use |t|.
"""

import logging
from abc import abstractmethod
from numbers import Real
from typing import Any, Dict, Iterable, Tuple, Union

import numpy as np

from .base import AbstractRepr

logger = logging.getLogger(__name__)

TimeLike = Union[float, np.ndarray]

# Samples used by slope_extremes on tabulated profiles.
EXTREMES_SAMPLES = 10_000
# exp() overflows a double just above 709.
MAX_EXPONENT = 700.0


def _check_gamma(value: float) -> float:
    if not isinstance(value, Real) or isinstance(value, bool):
        raise TypeError('gamma must be a real number')
    if value < 0 or not np.isfinite(value):
        raise ValueError('gamma must be finite and >= 0')
    return float(value)


def _as_time(t: TimeLike) -> TimeLike:
    if isinstance(t, np.ndarray):
        return np.abs(t.astype(float))
    return abs(float(t))


class AbstractDamping(AbstractRepr):
    """Abstract damping profile."""

    __slots__ = ()

    kind = ''

    def __eq__(self, other: Any) -> bool:
        """Compare by serialized form."""
        if not isinstance(other, AbstractDamping):
            return NotImplemented
        return self.to_spec() == other.to_spec()

    def __hash__(self) -> int:
        """Hash by kind."""
        return hash(self.kind)

    @abstractmethod
    def rate(self, t: TimeLike) -> TimeLike:
        """Get a(t)."""

    @abstractmethod
    def integral(self, t: TimeLike) -> TimeLike:
        """Get A(t), the integral of a over [0, |t|]."""

    @abstractmethod
    def to_spec(self) -> Dict[str, Any]:
        """Get the profile as a kind tag plus parameters."""

    @property
    def exploratory(self) -> bool:
        """Whether a(t) vanishes on a whole interval of time."""
        return False


class Constant(AbstractDamping):
    """Constant damping a(t) = gamma."""

    __slots__ = '_gamma',

    kind = 'constant'

    def __init__(self, gamma: float):
        """Set the damping rate."""
        self.gamma = gamma

    @property
    def gamma(self) -> float:
        """Get the damping rate."""
        return self._gamma

    @gamma.setter
    def gamma(self, value: float) -> None:
        """Set the damping rate (>= 0)."""
        self._gamma = _check_gamma(value)

    def rate(self, t: TimeLike) -> TimeLike:
        """Get a(t) = gamma."""
        t = _as_time(t)
        return np.full_like(t, self.gamma) if isinstance(t, np.ndarray) else self.gamma

    def integral(self, t: TimeLike) -> TimeLike:
        """Get A(t) = gamma t."""
        return self.gamma * _as_time(t)

    def to_spec(self) -> Dict[str, Any]:
        """Get the serialized profile."""
        return {'kind': self.kind, 'gamma': self.gamma}


class ScaledLog(AbstractDamping):
    """Damping a(t) = gamma/(1 + t), so that t a(t) -> gamma."""

    __slots__ = '_gamma',

    kind = 'scaled_log'

    def __init__(self, gamma: float):
        """Set the asymptotic constant gamma."""
        self.gamma = gamma

    @property
    def gamma(self) -> float:
        """Get gamma."""
        return self._gamma

    @gamma.setter
    def gamma(self, value: float) -> None:
        """Set gamma (>= 0)."""
        self._gamma = _check_gamma(value)

    def rate(self, t: TimeLike) -> TimeLike:
        """Get a(t) = gamma/(1 + t)."""
        return self.gamma / (1 + _as_time(t))

    def integral(self, t: TimeLike) -> TimeLike:
        """Get A(t) = gamma ln(1 + t)."""
        return self.gamma * np.log1p(_as_time(t))

    def to_spec(self) -> Dict[str, Any]:
        """Get the serialized profile."""
        return {'kind': self.kind, 'gamma': self.gamma}


class Table(AbstractDamping):
    """Piecewise linear damping through knots (t_k, a_k).

    Linear between knots and constant after the last one. The first knot
    must sit at t = 0, times must increase strictly and every a_k >= 0.
    """

    __slots__ = ('_times', '_values', '_cumulative')

    kind = 'table'

    def __init__(self, knots: Iterable[Tuple[float, float]]):
        """Set the knots."""
        self.knots = knots

    @property
    def knots(self) -> Tuple[Tuple[float, float], ...]:
        """Get the knots as (t, a) pairs."""
        return tuple(zip(self._times.tolist(), self._values.tolist()))

    @knots.setter
    def knots(self, knots: Iterable[Tuple[float, float]]) -> None:
        """Validate and store the knots, precomputing A at each one."""
        try:
            pairs = [(float(t), float(a)) for t, a in knots]
        except (TypeError, ValueError):
            raise TypeError('knots must be an iterable of (t, a) number pairs')
        if not pairs:
            raise ValueError('knots can not be empty')
        times = np.array([t for t, _ in pairs])
        values = np.array([a for _, a in pairs])
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValueError('knots must be finite')
        if times[0] != 0:
            raise ValueError('the first knot must be at t = 0')
        if np.any(np.diff(times) <= 0):
            raise ValueError('knot times must increase strictly')
        if np.any(values < 0):
            raise ValueError('knot values must be >= 0')
        self._times = times
        self._values = values
        segments = np.diff(times) * (values[1:] + values[:-1]) / 2
        self._cumulative = np.concatenate(([0.0], np.cumsum(segments)))

    def _locate(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        index = np.clip(np.searchsorted(self._times, t, side='right') - 1,
                        0, len(self._times) - 1)
        elapsed = t - self._times[index]
        slopes = np.zeros_like(self._values)
        slopes[:-1] = np.diff(self._values) / np.diff(self._times)
        return index, elapsed, slopes[index]

    def rate(self, t: TimeLike) -> TimeLike:
        """Get a(t) by linear interpolation."""
        t = _as_time(t)
        index, elapsed, slope = self._locate(np.atleast_1d(t))
        result = self._values[index] + slope * elapsed
        return result if isinstance(t, np.ndarray) else float(result[0])

    def integral(self, t: TimeLike) -> TimeLike:
        """Get A(t), exact for a piecewise linear a."""
        t = _as_time(t)
        index, elapsed, slope = self._locate(np.atleast_1d(t))
        result = (self._cumulative[index] + self._values[index] * elapsed
                  + slope * elapsed ** 2 / 2)
        return result if isinstance(t, np.ndarray) else float(result[0])

    def to_spec(self) -> Dict[str, Any]:
        """Get the serialized profile."""
        return {'kind': self.kind, 'knots': [list(pair) for pair in self.knots]}

    @property
    def exploratory(self) -> bool:
        """Whether two consecutive knots (or the last one) are zero."""
        zero = self._values == 0
        return bool(zero[-1] or np.any(zero[1:] & zero[:-1]))


class Zero(AbstractDamping):
    """No damping."""

    __slots__ = ()

    kind = 'zero'

    def rate(self, t: TimeLike) -> TimeLike:
        """Get a(t) = 0."""
        t = _as_time(t)
        return np.zeros_like(t) if isinstance(t, np.ndarray) else 0.0

    def integral(self, t: TimeLike) -> TimeLike:
        """Get A(t) = 0."""
        return self.rate(t)

    def to_spec(self) -> Dict[str, Any]:
        """Get the serialized profile."""
        return {'kind': self.kind}


def parse_knots(text: str) -> Tuple[Tuple[float, float], ...]:
    """Parse knots written as "t:a, t:a, ...".

    :raises ValueError: The text is malformed.
    """
    if not isinstance(text, str):
        raise TypeError('knots text must be string')
    knots = []
    for item in filter(None, (chunk.strip() for chunk in text.split(','))):
        t, sep, a = item.partition(':')
        if not sep:
            raise ValueError(f'knot "{item}" must be written as t:a')
        knots.append((float(t), float(a)))
    return tuple(knots)


def damping_from_spec(spec: Dict[str, Any]) -> AbstractDamping:
    """Build a profile from its serialized form (see to_spec)."""
    if not isinstance(spec, dict):
        raise TypeError('spec must be a dict')
    kind = spec.get('kind')
    if kind == Constant.kind:
        return Constant(spec['gamma'])
    if kind == ScaledLog.kind:
        return ScaledLog(spec['gamma'])
    if kind == Table.kind:
        knots = spec['knots']
        table = Table(parse_knots(knots) if isinstance(knots, str) else knots)
        if table.exploratory:
            logger.warning('damping table vanishes on an interval; results '
                           'are exploratory')
        return table
    if kind == Zero.kind:
        return Zero()
    raise ValueError(f'unknown damping kind: {kind!r}')


def A_of(profile: AbstractDamping, t: TimeLike) -> TimeLike:
    """Get A(t) = integral of a(s) over [0, |t|]."""
    return profile.integral(t)


def slope_extremes(profile: AbstractDamping,
                   t_max: float) -> Tuple[float, float]:
    """Get the infimum and supremum of A(t)/t.

    Built-in closed-form profiles get their exact values over all t > 0.
    Tables are sampled on (0, t_max] with log-spaced points plus the knots,
    together with the limit a(0) as t -> 0+.
    """
    if not isinstance(t_max, Real) or isinstance(t_max, bool):
        raise TypeError('t_max must be a real number')
    if t_max <= 0:
        raise ValueError('t_max must be > 0')
    if isinstance(profile, Constant):
        return profile.gamma, profile.gamma
    if isinstance(profile, ScaledLog):
        # ln(1 + t)/t decreases from 1 at 0+ to 0 at infinity
        return 0.0, profile.gamma
    if isinstance(profile, Zero):
        return 0.0, 0.0
    knots = [t for t, _ in getattr(profile, 'knots', ()) if 0 < t <= t_max]
    times = np.union1d(np.geomspace(t_max * 1e-8, t_max, EXTREMES_SAMPLES),
                       knots)
    slopes = profile.integral(times) / times
    limit = float(profile.rate(0.0))
    return (min(float(slopes.min()), limit), max(float(slopes.max()), limit))


def gauge_factor(profile: AbstractDamping, t: TimeLike, k: float) -> TimeLike:
    """Get exp(-k A(t)).

    k = -1 is the u -> v gauge e^A, k = p - 1 the coefficient of the
    nonlinearity in the gauged equation.

    :raises OverflowError: The result would not fit a double.
    """
    exponent = -k * profile.integral(t)
    if np.any(exponent > MAX_EXPONENT):
        raise OverflowError(f'gauge factor exp({np.max(exponent):.6g}) overflows')
    return np.exp(exponent)

