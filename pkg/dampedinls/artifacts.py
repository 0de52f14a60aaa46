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

"""Reading and writing run artifacts (CSV tables and JSON reports).

Payload files never carry wall-clock data, so identical runs produce
byte-identical files; the timestamp lives in metadata.json alone.
"""

import json
import math
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

PathLike = Union[str, Path]

CSV_FORMAT = '%.17g'


def to_jsonable(value: Any) -> Any:
    """Convert numpy values, tuples and enums to plain JSON types.

    Non-finite floats become None (null).
    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, complex):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    return value


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    """Write a JSON document with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
                    + '\n')
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    """Read a JSON document."""
    return json.loads(Path(path).read_text())


def write_csv(path: PathLike, columns: Sequence[str], table: np.ndarray) -> Path:
    """Write a table with one header line and full double precision."""
    path = Path(path)
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[1] != len(columns):
        raise ValueError(f'table of shape {table.shape} does not match '
                         f'{len(columns)} columns')
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, table, fmt=CSV_FORMAT, delimiter=',',
               header=','.join(columns), comments='')
    return path


def read_csv(path: PathLike) -> Tuple[Tuple[str, ...], np.ndarray]:
    """Read a table written by write_csv."""
    path = Path(path)
    with path.open() as stream:
        columns = tuple(stream.readline().strip().split(','))
    table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    return columns, table


def write_metadata(directory: PathLike, command: str, version: str) -> Path:
    """Write metadata.json with the wall-clock time of the run."""
    return write_json(Path(directory) / 'metadata.json', {
        'command': command,
        'timestamp': datetime.now(timezone.utc).isoformat(),
        'version': version,
    })
