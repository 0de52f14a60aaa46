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

"""Exceptions raised by DampedINLS besides the builtin ones."""

from typing import Dict, Iterable, Optional


class ConfigError(ValueError):
    """An experiment configuration failed validation.

    All problems are collected before raising, each one as a
    ``section.key: message`` string.
    """

    def __init__(self, problems: Iterable[str]):
        """Create the error from the list of problems found."""
        self.problems = tuple(problems)
        super().__init__('invalid configuration:\n  ' + '\n  '.join(self.problems))


class ConvergenceError(RuntimeError):
    """The ground state minimization did not converge."""

    def __init__(self, message: str, residuals: Optional[Dict[str, float]] = None):
        """Create the error keeping the last residuals for the report."""
        self.residuals = dict(residuals or {})
        details = ', '.join(f'{key}={value:.3e}' for key, value in
                            sorted(self.residuals.items()))
        super().__init__(f'{message} ({details})' if details else message)


class BlowUpDetected(ArithmeticError):
    """The gauge variable overflowed during a splitting step."""

    def __init__(self, time: float, magnitude: float):
        """Record the time of the offending step and the size reached."""
        self.time = time
        self.magnitude = magnitude
        super().__init__(f'numerical blow-up at t={time:.6g} '
                         f'(|v|^(p-1) reached {magnitude:.3e})')
