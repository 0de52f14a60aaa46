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

"""Experiment configuration: INI files with strict sections and keys.

Every value is validated before anything runs; all problems are reported
together in one ConfigError.
"""

import logging
import os
from configparser import ConfigParser, Error as ParserError
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from .artifacts import PathLike
from .damping import AbstractDamping, Constant, damping_from_spec
from .errors import ConfigError
from .params import ModelParams
from .radial import RadialGrid

logger = logging.getLogger(__name__)

OUTPUT_VARIABLE = 'DAMPEDINLS_OUT'
DEFAULT_OUTPUT = 'out'

DEFAULTS: Dict[str, Dict[str, str]] = {
    'model': {'N': '3', 'b': '0.5', 'p': '2.0', 'lambda': '0.0', 'mu': '-1'},
    'grid': {'R': '40.0', 'n': '512'},
    'time': {'T': '20.0', 'dt': '1e-3', 'sample_every': '1',
             'snapshot_every': '0.1'},
    'damping': {'kind': 'constant', 'gamma': '0.3', 'knots': ''},
    'initial': {'kind': 'gaussian', 'width': '1.0', 'amplitude': '1.0',
                'scale': '0.5', 'path': ''},
    'groundstate': {'tol': '1e-10', 'max_iter': '20000', 'identity_tol': '1e-2',
                    'el_tol': '1e-8'},
    'diagnostics': {'c0': '1.0', 'scatter_tol': '1e-4', 'blowup_factor': '1e6',
                    'resolution_limit': '0.5', 'gradient_limit': '1.0',
                    'boundary_fraction': '1e-6', 'monotone_window': '1.0'},
    'scan': {'scales': '0.5, 0.8, 0.95, 1.05, 1.2, 1.5',
             'gammas': '0.1, 0.2, 0.4, 0.8, 1.6', 'r_values': '2, 4, 6',
             'window': '5, 50'},
    'verify': {'samples': '50', 'gn_samples': '500', 'r_values': '2, 4, 6'},
}

INITIAL_KINDS = ('gaussian', 'groundstate', 'file')


def _integer(text: str) -> int:
    return int(text)


def _real(text: str) -> float:
    value = float(text)
    if value != value or value in (float('inf'), float('-inf')):
        raise ValueError(f'{text!r} is not a finite number')
    return value


def _positive(text: str) -> float:
    value = _real(text)
    if value <= 0:
        raise ValueError('must be > 0')
    return value


def _positive_integer(text: str) -> int:
    value = _integer(text)
    if value < 1:
        raise ValueError('must be >= 1')
    return value


def _fraction(text: str) -> float:
    value = _real(text)
    if not 0 < value <= 1:
        raise ValueError('must satisfy 0 < value <= 1')
    return value


def _reals(text: str) -> Tuple[float, ...]:
    return tuple(_real(item) for item in text.split(',') if item.strip())


def _window(text: str) -> Tuple[float, float]:
    values = _reals(text)
    if len(values) != 2 or not 0 <= values[0] < values[1]:
        raise ValueError('must be "t1, t2" with 0 <= t1 < t2')
    return values[0], values[1]


def _text(text: str) -> str:
    return text.strip()


CONVERTERS: Dict[str, Dict[str, Callable[[str], Any]]] = {
    'model': {'N': _integer, 'b': _real, 'p': _real, 'lambda': _real,
              'mu': _integer},
    'grid': {'R': _real, 'n': _integer},
    'time': {'T': _positive, 'dt': _positive, 'sample_every': _positive_integer,
             'snapshot_every': _positive},
    'damping': {'kind': _text, 'gamma': _real, 'knots': _text},
    'initial': {'kind': _text, 'width': _positive, 'amplitude': _real,
                'scale': _real, 'path': _text},
    'groundstate': {'tol': _positive, 'max_iter': _positive_integer,
                    'identity_tol': _positive, 'el_tol': _positive},
    'diagnostics': {'c0': _positive, 'scatter_tol': _positive,
                    'blowup_factor': _positive, 'resolution_limit': _positive,
                    'gradient_limit': _positive, 'boundary_fraction': _positive,
                    'monotone_window': _fraction},
    'scan': {'scales': _reals, 'gammas': _reals, 'r_values': _reals,
             'window': _window},
    'verify': {'samples': _positive_integer, 'gn_samples': _positive_integer,
               'r_values': _reals},
}


@dataclass(frozen=True)
class InitialData:
    """How to build u0: a Gaussian, a scaled ground state or a CSV file."""

    kind: str = 'gaussian'
    width: float = 1.0
    amplitude: float = 1.0
    scale: float = 0.5
    path: str = ''


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment with every default materialized."""

    params: ModelParams = field(default_factory=ModelParams)
    grid: RadialGrid = field(default_factory=RadialGrid)
    T: float = 20.0
    dt: float = 1e-3
    sample_every: int = 1
    snapshot_every: float = 0.1
    damping: AbstractDamping = field(default_factory=lambda: Constant(0.3))
    initial: InitialData = field(default_factory=InitialData)
    options: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def option(self, section: str, key: str) -> Any:
        """Get a command option, e.g. option('scan', 'window')."""
        return self.options[section][key]

    def as_dict(self) -> Dict[str, Any]:
        """Get the resolved configuration, keyed as in the INI file."""
        resolved = {
            'model': self.params.as_dict(),
            'grid': self.grid.as_dict(),
            'time': {'T': self.T, 'dt': self.dt, 'sample_every': self.sample_every,
                     'snapshot_every': self.snapshot_every},
            'damping': self.damping.to_spec(),
            'initial': {'kind': self.initial.kind, 'width': self.initial.width,
                        'amplitude': self.initial.amplitude,
                        'scale': self.initial.scale, 'path': self.initial.path},
        }
        for section, values in self.options.items():
            resolved[section] = dict(values)
        return resolved


def default_output_dir() -> Path:
    """Get $DAMPEDINLS_OUT, or ./out when unset."""
    return Path(os.environ.get(OUTPUT_VARIABLE) or DEFAULT_OUTPUT)


def _parser() -> ConfigParser:
    parser = ConfigParser(interpolation=None)
    parser.optionxform = str
    return parser


def _read_values(parser: ConfigParser,
                 problems: List[str]) -> Dict[str, Dict[str, Any]]:
    for section in parser.sections():
        if section not in DEFAULTS:
            problems.append(f'{section}: unknown section')
            continue
        for key in parser[section]:
            if key not in DEFAULTS[section]:
                problems.append(f'{section}.{key}: unknown key')
    values: Dict[str, Dict[str, Any]] = {}
    for section, defaults in DEFAULTS.items():
        values[section] = {}
        given = parser[section] if parser.has_section(section) else {}
        for key, default in defaults.items():
            text = given.get(key, default)
            try:
                values[section][key] = CONVERTERS[section][key](text)
            except (TypeError, ValueError) as error:
                problems.append(f'{section}.{key}: {error}')
    return values


def _assign(target: Any, section: str, names: Dict[str, str],
            values: Dict[str, Any], problems: List[str]) -> None:
    for key, attribute in names.items():
        if key not in values:
            continue
        try:
            setattr(target, attribute, values[key])
        except (TypeError, ValueError) as error:
            problems.append(f'{section}.{key}: {error}')


def _build_damping(values: Dict[str, Any],
                   problems: List[str]) -> Optional[AbstractDamping]:
    if 'kind' not in values:
        return None
    kind = values['kind']
    spec: Dict[str, Any] = {'kind': kind}
    if kind in ('constant', 'scaled_log'):
        if 'gamma' not in values:
            return None
        spec['gamma'] = values['gamma']
    elif kind == 'table':
        if not values.get('knots'):
            problems.append('damping.knots: required when kind = table')
            return None
        spec['knots'] = values['knots']
    try:
        return damping_from_spec(spec)
    except (TypeError, ValueError) as error:
        key = 'knots' if kind == 'table' else ('gamma' if 'gamma' in spec else 'kind')
        problems.append(f'damping.{key}: {error}')
        return None


def _build_initial(values: Dict[str, Any], problems: List[str],
                   base: Optional[Path]) -> InitialData:
    kind = values.get('kind', 'gaussian')
    path = values.get('path', '')
    if kind not in INITIAL_KINDS:
        problems.append(f'initial.kind: must be one of {", ".join(INITIAL_KINDS)}')
    elif kind == 'file' and not path:
        problems.append('initial.path: required when kind = file')
    if path and base is not None and not Path(path).is_absolute():
        path = str(base / path)
    return InitialData(kind, values.get('width', 1.0), values.get('amplitude', 1.0),
                       values.get('scale', 0.5), path)


def _check_scan(values: Dict[str, Any], problems: List[str]) -> None:
    for key in ('scales', 'gammas'):
        if any(value <= 0 for value in values.get(key, ())):
            problems.append(f'scan.{key}: values must be > 0')
    gammas = values.get('gammas', ())
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        problems.append('scan.gammas: values must be ascending')


def parse_config(text: str, base: Optional[Path] = None) -> ExperimentConfig:
    """Parse and validate an INI document.

    :param base: Directory that relative paths are resolved against.
    :raises ConfigError: With every problem found.
    """
    parser = _parser()
    try:
        parser.read_string(text)
    except ParserError as error:
        raise ConfigError([f'syntax: {error}'])
    problems: List[str] = []
    values = _read_values(parser, problems)

    params = ModelParams()
    _assign(params, 'model', {'N': 'N', 'b': 'b', 'p': 'p', 'lambda': 'lam',
                              'mu': 'mu'}, values['model'], problems)
    grid = RadialGrid()
    _assign(grid, 'grid', {'R': 'R', 'n': 'n'}, values['grid'], problems)
    damping = _build_damping(values['damping'], problems)
    initial = _build_initial(values['initial'], problems, base)
    _check_scan(values['scan'], problems)

    time = values['time']
    if 'T' in time and 'dt' in time and time['dt'] > time['T']:
        problems.append('time.dt: must be <= time.T')
    if problems:
        raise ConfigError(problems)
    options = {section: values[section]
               for section in ('groundstate', 'diagnostics', 'scan', 'verify')}
    config = ExperimentConfig(params, grid, time['T'], time['dt'],
                              time['sample_every'], time['snapshot_every'],
                              damping, initial, options)
    logger.debug('resolved configuration: %s', config.as_dict())
    return config


def load_config(path: Optional[PathLike] = None) -> ExperimentConfig:
    """Read a configuration file; no path gives the defaults.

    :raises ConfigError: The file is missing or invalid.
    """
    if path is None:
        return parse_config('')
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as error:
        raise ConfigError([f'{path}: {error.strerror or error}'])
    return parse_config(text, path.parent)
